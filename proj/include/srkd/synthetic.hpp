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

#ifndef SRKD_SYNTHETIC_HPP_
#define SRKD_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "srkd/dataset.hpp"
#include "srkd/events.hpp"
#include "srkd/rng.hpp"

namespace srkd {

enum class SyntheticKind { kBlobs, kSpikePatterns };

const char* to_string(SyntheticKind kind);
SyntheticKind synthetic_kind_from_string(const std::string& name);

// Defaults are the desk-scale benchmark: 4 classes, 200 train + 100 test
// per class, 8x8 single channel, noise 0.1.
struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kBlobs;
  std::size_t num_classes = 4;
  std::size_t train_per_class = 200;
  std::size_t test_per_class = 100;
  std::size_t channels = 1;
  std::size_t height = 8;
  std::size_t width = 8;
  double noise = 0.1;
  // spike-patterns only
  std::size_t timesteps = kDefaultEventTimesteps;
  std::uint64_t window = 1000;

  void validate() const;
};

// Per-class template image [c,h,w]: a Gaussian bump centred on a ring,
// class k at angle 2 pi k / C.
Tensor blob_template(const SyntheticSpec& spec, std::size_t label);

// One class-k event stream: a dot moving from the centre towards angle
// 2 pi k / C, plus uniformly scattered noise events.
std::vector<EventRecord> spike_pattern_events(const SyntheticSpec& spec, std::size_t label, Rng& rng);

// blobs: template + N(0, noise^2) per pixel, clipped to [0,1].
// spike-patterns: spike_pattern_events run through integrate_events.
// Samples are stored class-interleaved (label = index mod C).
DatasetHandle gen_synthetic(const SyntheticSpec& spec, Rng& rng);

}  // namespace srkd

#endif  // SRKD_SYNTHETIC_HPP_
