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

#include "srkd/network.hpp"

#include <cmath>
#include <string>

#include "srkd/error.hpp"

namespace srkd {

void IFConfig::validate() const {
  if (!std::isfinite(v_threshold) || !std::isfinite(v_reset) || !(v_threshold > v_reset)) {
    fail(ErrorKind::kParameter, "IF neuron requires v_threshold > v_reset");
  }
  if (surrogate == SurrogateKind::kRectangular && !(surrogate_width > 0.0)) {
    fail(ErrorKind::kParameter, "rectangular surrogate width must be > 0");
  }
  if (surrogate == SurrogateKind::kArctangent && !(surrogate_slope > 0.0)) {
    fail(ErrorKind::kParameter, "arctangent surrogate slope must be > 0");
  }
}

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kLinear: return "linear";
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kAvgPool: return "avgpool";
    case LayerKind::kFlatten: return "flatten";
    case LayerKind::kIFNeuron: return "if_neuron";
    case LayerKind::kReadout: return "readout";
  }
  return "?";
}

LayerKind layer_kind_from_string(const std::string& name) {
  for (LayerKind k : {LayerKind::kLinear, LayerKind::kConv2d, LayerKind::kAvgPool, LayerKind::kFlatten,
                      LayerKind::kIFNeuron, LayerKind::kReadout}) {
    if (name == to_string(k)) return k;
  }
  fail(ErrorKind::kFormat, "unknown layer kind '" + name + "'");
}

LayerSpec LayerSpec::linear(std::size_t in, std::size_t out) {
  LayerSpec l;
  l.kind = LayerKind::kLinear;
  l.in_features = in;
  l.out_features = out;
  return l;
}

LayerSpec LayerSpec::readout(std::size_t in, std::size_t out) {
  LayerSpec l = linear(in, out);
  l.kind = LayerKind::kReadout;
  return l;
}

LayerSpec LayerSpec::conv2d(std::size_t c_in, std::size_t c_out, std::size_t k, std::size_t stride,
                            std::size_t padding) {
  LayerSpec l;
  l.kind = LayerKind::kConv2d;
  l.in_channels = c_in;
  l.out_channels = c_out;
  l.kernel = k;
  l.stride = stride;
  l.padding = padding;
  return l;
}

LayerSpec LayerSpec::avgpool(std::size_t k) {
  LayerSpec l;
  l.kind = LayerKind::kAvgPool;
  l.pool = k;
  return l;
}

LayerSpec LayerSpec::flatten() { return LayerSpec{}; }

LayerSpec LayerSpec::if_neuron(IFConfig cfg) {
  LayerSpec l;
  l.kind = LayerKind::kIFNeuron;
  l.neuron = cfg;
  return l;
}

std::vector<Shape> NetworkSpec::validate() const {
  if (timesteps == 0) fail(ErrorKind::kConfig, "timesteps must be >= 1");
  if (input_shape.empty()) fail(ErrorKind::kConfig, "network input shape is empty");
  for (std::size_t d : input_shape) {
    if (d == 0) fail(ErrorKind::kConfig, "network input shape has a zero axis");
  }
  if (layers.empty() || layers.back().kind != LayerKind::kReadout) {
    fail(ErrorKind::kConfig, "last layer must be the non-spiking readout");
  }

  std::vector<Shape> shapes;
  shapes.reserve(layers.size());
  Shape cur = input_shape;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    const std::string where = "layer " + std::to_string(i) + " (" + to_string(l.kind) + ")";
    switch (l.kind) {
      case LayerKind::kLinear:
      case LayerKind::kReadout:
        if (l.kind == LayerKind::kReadout && i + 1 != layers.size()) {
          fail(ErrorKind::kConfig, where + ": readout must be the last layer");
        }
        if (l.in_features == 0 || l.out_features == 0) fail(ErrorKind::kConfig, where + ": zero features");
        if (cur.size() != 1 || cur[0] != l.in_features) {
          fail(ErrorKind::kDimension, where + ": expects [" + std::to_string(l.in_features) + "], got " +
                                          shape_to_string(cur));
        }
        cur = {l.out_features};
        break;
      case LayerKind::kConv2d: {
        if (l.in_channels == 0 || l.out_channels == 0 || l.kernel == 0 || l.stride == 0) {
          fail(ErrorKind::kConfig, where + ": zero-sized convolution parameter");
        }
        if (cur.size() != 3 || cur[0] != l.in_channels) {
          fail(ErrorKind::kDimension, where + ": expects [" + std::to_string(l.in_channels) +
                                          ",h,w], got " + shape_to_string(cur));
        }
        const std::size_t ph = cur[1] + 2 * l.padding, pw = cur[2] + 2 * l.padding;
        if (l.kernel > ph || l.kernel > pw) fail(ErrorKind::kDimension, where + ": kernel larger than padded input");
        cur = {l.out_channels, (ph - l.kernel) / l.stride + 1, (pw - l.kernel) / l.stride + 1};
        break;
      }
      case LayerKind::kAvgPool:
        if (l.pool == 0) fail(ErrorKind::kConfig, where + ": zero pool size");
        if (cur.size() != 3 || cur[1] < l.pool || cur[2] < l.pool) {
          fail(ErrorKind::kDimension, where + ": cannot pool " + shape_to_string(cur));
        }
        cur = {cur[0], cur[1] / l.pool, cur[2] / l.pool};
        break;
      case LayerKind::kFlatten:
        cur = {shape_numel(cur)};
        break;
      case LayerKind::kIFNeuron:
        l.neuron.validate();
        break;
    }
    if (l.kind == LayerKind::kLinear || l.kind == LayerKind::kConv2d) {
      std::size_t j = i + 1;
      while (j < layers.size() &&
             (layers[j].kind == LayerKind::kAvgPool || layers[j].kind == LayerKind::kFlatten)) {
        ++j;
      }
      if (j >= layers.size() || layers[j].kind != LayerKind::kIFNeuron) {
        fail(ErrorKind::kConfig, where + ": weighted layer must be followed by an if_neuron layer");
      }
    }
    shapes.push_back(cur);
  }
  return shapes;
}

std::size_t NetworkSpec::num_classes() const {
  if (layers.empty()) fail(ErrorKind::kConfig, "empty network");
  return layers.back().out_features;
}

std::size_t NetworkState::num_parameters() const {
  std::size_t n = 0;
  for (const Tensor& p : params) n += p.size();
  return n;
}

std::optional<std::size_t> NetworkState::layout_index(std::size_t layer) const {
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout[i].layer == layer) return i;
  }
  return std::nullopt;
}

void NetworkState::apply_masks() {
  for (std::size_t i = 0; i < masks.size() && i < params.size(); ++i) {
    if (!masks[i]) continue;
    const Tensor& m = *masks[i];
    require_same_shape(params[i], m, "mask " + param_names[i]);
    for (std::size_t k = 0; k < m.size(); ++k) params[i][k] *= m[k];
  }
}

NetworkState init_params(const NetworkSpec& spec, Rng& rng) {
  spec.validate();
  NetworkState state;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    if (!l.has_parameters()) continue;
    Shape wshape, bshape;
    std::size_t fan_in = 0;
    if (l.kind == LayerKind::kConv2d) {
      wshape = {l.out_channels, l.in_channels, l.kernel, l.kernel};
      bshape = {l.out_channels};
      fan_in = l.in_channels * l.kernel * l.kernel;
    } else {
      wshape = {l.out_features, l.in_features};
      bshape = {l.out_features};
      fan_in = l.in_features;
    }
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    Tensor w(wshape);
    for (double& v : w.data()) v = rng.uniform(-bound, bound);
    ParamRef ref;
    ref.layer = i;
    ref.weight = state.params.size();
    state.params.push_back(std::move(w));
    state.param_names.push_back("layer" + std::to_string(i) + "." + to_string(l.kind) + ".weight");
    ref.bias = state.params.size();
    state.params.emplace_back(bshape, 0.0);
    state.param_names.push_back("layer" + std::to_string(i) + "." + to_string(l.kind) + ".bias");
    state.layout.push_back(ref);
  }
  state.masks.resize(state.params.size());
  return state;
}

std::vector<Tensor> zeros_like(const std::vector<Tensor>& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const Tensor& p : params) out.emplace_back(p.shape(), 0.0);
  return out;
}

NetworkPreset preset_from_string(const std::string& name) {
  if (name == "mlp") return NetworkPreset::kMlp;
  if (name == "small-conv") return NetworkPreset::kSmallConv;
  fail(ErrorKind::kUsage, "unknown network preset '" + name + "' (expected mlp or small-conv)");
}

const char* to_string(NetworkPreset preset) {
  return preset == NetworkPreset::kMlp ? "mlp" : "small-conv";
}

NetworkSpec make_preset(NetworkPreset preset, const Shape& input_shape, std::size_t num_classes,
                        std::size_t timesteps, const IFConfig& neuron) {
  if (num_classes < 2) fail(ErrorKind::kConfig, "need at least 2 classes");
  NetworkSpec spec;
  spec.input_shape = input_shape;
  spec.timesteps = timesteps;
  auto& L = spec.layers;
  if (preset == NetworkPreset::kMlp) {
    L.push_back(LayerSpec::flatten());
    L.push_back(LayerSpec::linear(shape_numel(input_shape), 64));
    L.push_back(LayerSpec::if_neuron(neuron));
    L.push_back(LayerSpec::linear(64, 32));
    L.push_back(LayerSpec::if_neuron(neuron));
    L.push_back(LayerSpec::readout(32, num_classes));
  } else {
    if (input_shape.size() != 3) fail(ErrorKind::kConfig, "small-conv preset needs [c,h,w] input");
    const std::size_t c = input_shape[0], h = input_shape[1], w = input_shape[2];
    if (h < 4 || w < 4) fail(ErrorKind::kConfig, "small-conv preset needs inputs of at least 4x4");
    L.push_back(LayerSpec::conv2d(c, 8, 3, 1, 1));
    L.push_back(LayerSpec::if_neuron(neuron));
    L.push_back(LayerSpec::avgpool(2));
    L.push_back(LayerSpec::conv2d(8, 16, 3, 1, 1));
    L.push_back(LayerSpec::if_neuron(neuron));
    L.push_back(LayerSpec::avgpool(2));
    L.push_back(LayerSpec::flatten());
    L.push_back(LayerSpec::linear(16 * (h / 2 / 2) * (w / 2 / 2), 32));
    L.push_back(LayerSpec::if_neuron(neuron));
    L.push_back(LayerSpec::readout(32, num_classes));
  }
  spec.validate();
  return spec;
}

}  // namespace srkd
