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

#ifndef SRKD_PRUNING_HPP_
#define SRKD_PRUNING_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "srkd/network.hpp"
#include "srkd/tensor.hpp"

namespace srkd {

enum class PruneScope { kConvOnly, kAllWeighted };
enum class PruneRanking { kGlobal, kPerLayer };

const char* to_string(PruneScope scope);
const char* to_string(PruneRanking ranking);
PruneScope prune_scope_from_string(const std::string& name);
PruneRanking prune_ranking_from_string(const std::string& name);

// One 0/1 tensor per in-scope weight tensor. The readout layer and all
// biases are never in scope.
struct PruneMask {
  struct Entry {
    std::size_t param_index = 0;
    Tensor mask;
    friend bool operator==(const Entry&, const Entry&) = default;
  };
  std::vector<Entry> entries;
  double ratio = 0.0;
  PruneScope scope = PruneScope::kConvOnly;
  PruneRanking ranking = PruneRanking::kGlobal;

  friend bool operator==(const PruneMask&, const PruneMask&) = default;
};

// Parameter indices of the weight tensors a scope covers, in layer order.
std::vector<std::size_t> prunable_params(const NetworkSpec& spec, const NetworkState& state,
                                         PruneScope scope);

// Zeros the floor(ratio * N) in-scope weights of smallest |w|; ties go to the
// lower (tensor index, flat element index) first. Global ranking sorts all
// in-scope weights together; per-layer ranking sorts each tensor on its own.
PruneMask compute_mask(const NetworkSpec& spec, const NetworkState& state, double ratio,
                       PruneScope scope = PruneScope::kConvOnly,
                       PruneRanking ranking = PruneRanking::kGlobal);

// W ⊙ M.
Tensor apply_mask(const Tensor& weights, const Tensor& mask);

// Stores the mask on the state and zeros the masked weights.
void attach_mask(NetworkState& state, const PruneMask& mask);

struct SparsityReport {
  struct TensorEntry {
    std::size_t param_index = 0;
    std::string name;
    std::size_t total = 0;
    std::size_t pruned = 0;
    double fraction = 0.0;
  };
  std::vector<TensorEntry> tensors;
  std::size_t total = 0;
  std::size_t pruned = 0;
  double overall = 0.0;
};

SparsityReport sparsity_report(const PruneMask& mask, const NetworkState& state);

}  // namespace srkd

#endif  // SRKD_PRUNING_HPP_
