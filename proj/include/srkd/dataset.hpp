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

#ifndef SRKD_DATASET_HPP_
#define SRKD_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "srkd/tensor.hpp"

namespace srkd {

// kStaticCurrent samples are [c,h,w] images repeated as constant input
// current each timestep. kEventFrames samples are already [T,2,h,w] frame
// sequences, one frame per timestep.
enum class Encoding { kStaticCurrent, kEventFrames };

const char* to_string(Encoding encoding);
Encoding encoding_from_string(const std::string& name);

inline constexpr std::size_t kDefaultStaticTimesteps = 4;
inline constexpr std::size_t kDefaultEventTimesteps = 16;
std::size_t default_timesteps(Encoding encoding);

struct DatasetSplit {
  std::vector<Tensor> samples;
  std::vector<std::uint32_t> labels;

  std::size_t size() const { return samples.size(); }
  friend bool operator==(const DatasetSplit&, const DatasetSplit&) = default;
};

struct DatasetHandle {
  std::size_t num_classes = 0;
  Shape sample_shape;
  Encoding encoding = Encoding::kStaticCurrent;
  DatasetSplit train;
  DatasetSplit test;
  // Canonical JSON describing where the data came from (generator settings
  // or import path); echoed into reports.
  std::string source = "{}";

  // Labels in [0, C) and every sample of the declared shape.
  void validate() const;
  // Shape fed to the network at one timestep.
  Shape step_shape() const;
  // Timesteps implied by the data: fixed for event frames, the static
  // default otherwise.
  std::size_t natural_timesteps() const;
  // [T, ...step_shape] network input for one sample.
  Tensor network_input(const DatasetSplit& split, std::size_t index, std::size_t timesteps) const;

  friend bool operator==(const DatasetHandle&, const DatasetHandle&) = default;
};

// Direct encoding: [c,h,w] with values in [0,1] -> [T,c,h,w], the image at
// every step. The first IF layer of the network turns this into spikes.
Tensor encode_static(const Tensor& image, std::size_t timesteps);

// SRKD container: "SRKD" | u32 version | u64 manifest length | JSON manifest
// | little-endian tensor blobs in manifest order.
inline constexpr std::uint32_t kDatasetFormatVersion = 1;
void save_dataset(const DatasetHandle& data, const std::string& path);
DatasetHandle load_dataset(const std::string& path);
std::vector<std::uint8_t> serialize_dataset(const DatasetHandle& data);
DatasetHandle deserialize_dataset(const std::vector<std::uint8_t>& bytes, const std::string& what = "dataset");

// Batch order for one epoch: a pure function of (seed, epoch).
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch);

}  // namespace srkd

#endif  // SRKD_DATASET_HPP_
