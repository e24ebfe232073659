// Copyright 2026 The SRKD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SRKD_CHECKPOINT_HPP_
#define SRKD_CHECKPOINT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srkd/network.hpp"
#include "srkd/pruning.hpp"

namespace srkd {

// A trained (possibly pruned) model. `meta` is free-form canonical JSON
// carried through save/load (e.g. the evaluation accuracy of a teacher).
struct Checkpoint {
  NetworkSpec spec;
  NetworkState state;
  std::uint64_t seed = 0;
  std::size_t epoch = 0;
  std::optional<PruneMask> mask;
  std::string meta = "{}";
};

// "SRKC" | u32 version | u64 manifest length | JSON manifest | one f64 LE
// blob per parameter tensor (manifest order) | one u8 0/1 blob per mask.
inline constexpr std::uint32_t kCheckpointFormatVersion = 1;
std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes, const std::string& what = "checkpoint");
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace srkd

#endif  // SRKD_CHECKPOINT_HPP_
