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

#include "srkd/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "srkd/error.hpp"

namespace srkd {

const char* to_string(PruneScope scope) { return scope == PruneScope::kConvOnly ? "conv" : "all"; }

const char* to_string(PruneRanking ranking) {
  return ranking == PruneRanking::kGlobal ? "global" : "per-layer";
}

PruneScope prune_scope_from_string(const std::string& name) {
  if (name == "conv" || name == "conv-only") return PruneScope::kConvOnly;
  if (name == "all" || name == "all-weighted") return PruneScope::kAllWeighted;
  fail(ErrorKind::kUsage, "unknown prune scope '" + name + "' (expected conv or all)");
}

PruneRanking prune_ranking_from_string(const std::string& name) {
  if (name == "global") return PruneRanking::kGlobal;
  if (name == "per-layer") return PruneRanking::kPerLayer;
  fail(ErrorKind::kUsage, "unknown prune ranking '" + name + "' (expected global or per-layer)");
}

std::vector<std::size_t> prunable_params(const NetworkSpec& spec, const NetworkState& state,
                                         PruneScope scope) {
  std::vector<std::size_t> out;
  for (const ParamRef& ref : state.layout) {
    const LayerKind kind = spec.layers.at(ref.layer).kind;
    if (kind == LayerKind::kConv2d || (scope == PruneScope::kAllWeighted && kind == LayerKind::kLinear)) {
      out.push_back(ref.weight);
    }
  }
  return out;
}

namespace {

struct Candidate {
  double magnitude;
  std::size_t tensor;
  std::size_t element;
};

void zero_smallest(std::vector<Candidate>& cands, std::size_t count, std::vector<PruneMask::Entry>& entries) {
  if (count == 0) return;
  auto less = [](const Candidate& a, const Candidate& b) {
    return std::tie(a.magnitude, a.tensor, a.element) < std::tie(b.magnitude, b.tensor, b.element);
  };
  std::nth_element(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(count - 1), cands.end(), less);
  for (std::size_t i = 0; i < count; ++i) entries[cands[i].tensor].mask[cands[i].element] = 0.0;
}

}  // namespace

PruneMask compute_mask(const NetworkSpec& spec, const NetworkState& state, double ratio, PruneScope scope,
                       PruneRanking ranking) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    fail(ErrorKind::kParameter, "prune ratio must be in [0, 1], got " + std::to_string(ratio));
  }
  PruneMask mask;
  mask.ratio = ratio;
  mask.scope = scope;
  mask.ranking = ranking;
  const std::vector<std::size_t> params = prunable_params(spec, state, scope);
  for (std::size_t p : params) {
    require_finite(state.params[p], "prune weights " + state.param_names[p]);
    mask.entries.push_back({p, Tensor(state.params[p].shape(), 1.0)});
  }

  auto collect = [&](std::size_t t, std::vector<Candidate>& out) {
    const Tensor& w = state.params[mask.entries[t].param_index];
    for (std::size_t k = 0; k < w.size(); ++k) out.push_back({std::abs(w[k]), t, k});
  };
  auto quota = [ratio](std::size_t n) {
    return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
  };

  if (ranking == PruneRanking::kGlobal) {
    std::vector<Candidate> cands;
    for (std::size_t t = 0; t < mask.entries.size(); ++t) collect(t, cands);
    zero_smallest(cands, quota(cands.size()), mask.entries);
  } else {
    for (std::size_t t = 0; t < mask.entries.size(); ++t) {
      std::vector<Candidate> cands;
      collect(t, cands);
      zero_smallest(cands, quota(cands.size()), mask.entries);
    }
  }
  return mask;
}

Tensor apply_mask(const Tensor& weights, const Tensor& mask) {
  require_same_shape(weights, mask, "apply_mask");
  return hadamard(weights, mask);
}

void attach_mask(NetworkState& state, const PruneMask& mask) {
  state.masks.resize(state.params.size());
  for (const PruneMask::Entry& e : mask.entries) {
    if (e.param_index >= state.params.size()) fail(ErrorKind::kDimension, "mask refers to a missing parameter");
    require_same_shape(state.params[e.param_index], e.mask, "attach_mask");
    state.masks[e.param_index] = e.mask;
  }
  state.apply_masks();
}

SparsityReport sparsity_report(const PruneMask& mask, const NetworkState& state) {
  SparsityReport r;
  for (const PruneMask::Entry& e : mask.entries) {
    SparsityReport::TensorEntry te;
    te.param_index = e.param_index;
    te.name = e.param_index < state.param_names.size() ? state.param_names[e.param_index] : "";
    te.total = e.mask.size();
    for (double v : e.mask.data()) te.pruned += v == 0.0 ? 1 : 0;
    te.fraction = te.total ? static_cast<double>(te.pruned) / static_cast<double>(te.total) : 0.0;
    r.total += te.total;
    r.pruned += te.pruned;
    r.tensors.push_back(std::move(te));
  }
  r.overall = r.total ? static_cast<double>(r.pruned) / static_cast<double>(r.total) : 0.0;
  return r;
}

}  // namespace srkd
