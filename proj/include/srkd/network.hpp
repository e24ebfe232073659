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

#ifndef SRKD_NETWORK_HPP_
#define SRKD_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srkd/rng.hpp"
#include "srkd/tensor.hpp"

namespace srkd {

enum class SurrogateKind { kRectangular, kArctangent };

// Integrate-and-fire neuron parameters. `surrogate_width` is the window w of
// the rectangular surrogate, `surrogate_slope` the a of the arctangent one.
struct IFConfig {
  double v_threshold = 1.0;
  double v_reset = 0.0;
  SurrogateKind surrogate = SurrogateKind::kRectangular;
  double surrogate_width = 1.0;
  double surrogate_slope = 2.0;

  void validate() const;
  friend bool operator==(const IFConfig&, const IFConfig&) = default;
};

enum class LayerKind { kLinear, kConv2d, kAvgPool, kFlatten, kIFNeuron, kReadout };

const char* to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& name);

struct LayerSpec {
  LayerKind kind = LayerKind::kFlatten;
  // linear / readout
  std::size_t in_features = 0;
  std::size_t out_features = 0;
  // conv2d
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;
  std::size_t padding = 0;
  // avgpool (square window, stride == window)
  std::size_t pool = 0;
  // if_neuron
  IFConfig neuron{};

  static LayerSpec linear(std::size_t in, std::size_t out);
  static LayerSpec readout(std::size_t in, std::size_t out);
  static LayerSpec conv2d(std::size_t c_in, std::size_t c_out, std::size_t k, std::size_t stride = 1,
                          std::size_t padding = 0);
  static LayerSpec avgpool(std::size_t k);
  static LayerSpec flatten();
  static LayerSpec if_neuron(IFConfig cfg = {});

  bool has_parameters() const {
    return kind == LayerKind::kLinear || kind == LayerKind::kConv2d || kind == LayerKind::kReadout;
  }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// Layer topology plus the temporal unroll length. `input_shape` is the
// per-timestep input, e.g. [c,h,w].
struct NetworkSpec {
  Shape input_shape;
  std::vector<LayerSpec> layers;
  std::size_t timesteps = 1;

  // Checks the structural invariants and returns the activation shape after
  // every layer (index i = output of layer i).
  std::vector<Shape> validate() const;
  std::size_t num_classes() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

// Parameter tensors of one weighted layer.
struct ParamRef {
  std::size_t layer = 0;
  std::size_t weight = 0;  // index into NetworkState::params
  std::size_t bias = 0;

  friend bool operator==(const ParamRef&, const ParamRef&) = default;
};

// Trainable parameters, in layer order: weight then bias for each weighted
// layer. Membranes live in the forward trace, not here, so a state can be
// shared read-only across evaluation threads.
struct NetworkState {
  std::vector<Tensor> params;
  std::vector<std::string> param_names;
  std::vector<ParamRef> layout;  // one entry per weighted layer
  // Optional 0/1 mask per parameter tensor; re-applied after every update.
  std::vector<std::optional<Tensor>> masks;

  std::size_t num_parameters() const;
  // Index into layout for a given layer, if it is weighted.
  std::optional<std::size_t> layout_index(std::size_t layer) const;
  // Multiplies every masked parameter by its mask.
  void apply_masks();

  friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

// Weights ~ U(-sqrt(1/fan_in), +sqrt(1/fan_in)), biases 0. Draw order:
// layers ascending, then row-major within each weight tensor.
NetworkState init_params(const NetworkSpec& spec, Rng& rng);

// Buffers shaped like `state.params`, all zero.
std::vector<Tensor> zeros_like(const std::vector<Tensor>& params);

enum class NetworkPreset { kMlp, kSmallConv };

NetworkPreset preset_from_string(const std::string& name);
const char* to_string(NetworkPreset preset);

// mlp: flatten, linear(n,64), IF, linear(64,32), IF, readout(32,C).
// small-conv: conv(c,8,3,1,1), IF, avgpool(2), conv(8,16,3,1,1), IF,
//             avgpool(2), flatten, linear(.,32), IF, readout(32,C).
NetworkSpec make_preset(NetworkPreset preset, const Shape& input_shape, std::size_t num_classes,
                        std::size_t timesteps, const IFConfig& neuron = {});

}  // namespace srkd

#endif  // SRKD_NETWORK_HPP_
