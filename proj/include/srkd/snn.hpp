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

#ifndef SRKD_SNN_HPP_
#define SRKD_SNN_HPP_

#include <cstddef>
#include <vector>

#include "srkd/network.hpp"
#include "srkd/tensor.hpp"

namespace srkd {

struct IFStepResult {
  Tensor v_new;
  Tensor spikes;
};

// One integrate-and-fire update: v_c = v_prev + x; spike where
// v_c >= v_threshold; spiking units are reset to v_reset (hard reset).
IFStepResult if_step(const Tensor& v_prev, const Tensor& x, const IFConfig& cfg);

// Surrogate for dS/du with u = v_c - v_threshold.
//   rectangular: 1/w for |u| < w/2, else 0
//   arctangent:  (a/2) / (1 + (pi a u / 2)^2)
double surrogate_derivative(double u, const IFConfig& cfg);
Tensor surrogate_derivative(const Tensor& u, const IFConfig& cfg);

// Antiderivative of the surrogate, normalised to (0,1): the smooth spike
// used by SpikeMode::kRelaxed.
double surrogate_primitive(double u, const IFConfig& cfg);

// kHard is the regular binary-spike simulation. kRelaxed replaces the spike
// with surrogate_primitive() in the forward pass, so the whole unroll is
// differentiable and backward_temporal returns its exact gradient (including
// the reset path), which is what the finite-difference checks compare.
enum class SpikeMode { kHard, kRelaxed };

// Per-timestep intermediates recorded by forward_temporal for BPTT.
struct ForwardTrace {
  // Per-layer slots (indexed by layer position; unused slots stay empty).
  struct Step {
    std::vector<Tensor> layer_inputs;  // weighted/pool layers: their input
    std::vector<Tensor> v_candidate;   // IF layers: v_prev + x
    std::vector<Tensor> spikes;        // IF layers: emitted spikes
  };
  SpikeMode mode = SpikeMode::kHard;
  std::vector<Shape> shapes;          // activation shape after each layer
  std::vector<Step> steps;
  std::vector<Tensor> membranes;      // IF layers: membrane after the last step
  bool recorded = false;
};

// Runs every layer for each of spec.timesteps steps of input_seq
// ([T, ...input_shape]). Membranes start at v_reset. Returns the
// time-averaged readout, (1/T) sum_t readout(t). Masks attached to `state`
// are applied to the weights on the fly.
Tensor forward_temporal(const NetworkState& state, const NetworkSpec& spec, const Tensor& input_seq,
                        ForwardTrace* trace = nullptr, SpikeMode mode = SpikeMode::kHard);

// Reverse-mode accumulation through the recorded unroll. Returns one gradient
// tensor per parameter (same order as state.params). In kHard mode the spike
// derivative is the surrogate and the reset gate is detached.
std::vector<Tensor> backward_temporal(const NetworkState& state, const NetworkSpec& spec,
                                      const ForwardTrace& trace, const Tensor& logits_grad);

// Classical momentum: v <- momentum v + g; p <- p - lr v; then masks are
// re-applied so pruned entries stay exactly zero.
class SgdOptimizer {
 public:
  SgdOptimizer(double lr, double momentum);

  void step(NetworkState& state, const std::vector<Tensor>& grads);

  double lr() const { return lr_; }
  double momentum() const { return momentum_; }

 private:
  double lr_;
  double momentum_;
  std::vector<Tensor> velocity_;
};

}  // namespace srkd

#endif  // SRKD_SNN_HPP_
