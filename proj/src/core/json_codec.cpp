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

#include "srkd/json_codec.hpp"

#include "srkd/error.hpp"

namespace srkd {

using nlohmann::json;

json to_json(const IFConfig& cfg) {
  json j = {{"v_threshold", cfg.v_threshold}, {"v_reset", cfg.v_reset}};
  if (cfg.surrogate == SurrogateKind::kRectangular) {
    j["surrogate"] = "rectangular";
    j["width"] = cfg.surrogate_width;
  } else {
    j["surrogate"] = "arctangent";
    j["slope"] = cfg.surrogate_slope;
  }
  return j;
}

IFConfig if_config_from_json(const json& j) {
  IFConfig cfg;
  cfg.v_threshold = j.value("v_threshold", cfg.v_threshold);
  cfg.v_reset = j.value("v_reset", cfg.v_reset);
  const std::string kind = j.value("surrogate", std::string("rectangular"));
  if (kind == "rectangular") {
    cfg.surrogate = SurrogateKind::kRectangular;
  } else if (kind == "arctangent") {
    cfg.surrogate = SurrogateKind::kArctangent;
  } else {
    fail(ErrorKind::kFormat, "unknown surrogate '" + kind + "'");
  }
  cfg.surrogate_width = j.value("width", cfg.surrogate_width);
  cfg.surrogate_slope = j.value("slope", cfg.surrogate_slope);
  cfg.validate();
  return cfg;
}

json to_json(const LayerSpec& l) {
  json j = {{"kind", to_string(l.kind)}};
  switch (l.kind) {
    case LayerKind::kLinear:
    case LayerKind::kReadout:
      j["in"] = l.in_features;
      j["out"] = l.out_features;
      break;
    case LayerKind::kConv2d:
      j["c_in"] = l.in_channels;
      j["c_out"] = l.out_channels;
      j["k"] = l.kernel;
      j["stride"] = l.stride;
      j["pad"] = l.padding;
      break;
    case LayerKind::kAvgPool:
      j["k"] = l.pool;
      break;
    case LayerKind::kFlatten:
      break;
    case LayerKind::kIFNeuron:
      j["neuron"] = to_json(l.neuron);
      break;
  }
  return j;
}

LayerSpec layer_from_json(const json& j) {
  const LayerKind kind = layer_kind_from_string(j.at("kind").get<std::string>());
  switch (kind) {
    case LayerKind::kLinear:
      return LayerSpec::linear(j.at("in").get<std::size_t>(), j.at("out").get<std::size_t>());
    case LayerKind::kReadout:
      return LayerSpec::readout(j.at("in").get<std::size_t>(), j.at("out").get<std::size_t>());
    case LayerKind::kConv2d:
      return LayerSpec::conv2d(j.at("c_in").get<std::size_t>(), j.at("c_out").get<std::size_t>(),
                               j.at("k").get<std::size_t>(), j.value("stride", std::size_t{1}),
                               j.value("pad", std::size_t{0}));
    case LayerKind::kAvgPool:
      return LayerSpec::avgpool(j.at("k").get<std::size_t>());
    case LayerKind::kFlatten:
      return LayerSpec::flatten();
    case LayerKind::kIFNeuron:
      return LayerSpec::if_neuron(if_config_from_json(j.value("neuron", json::object())));
  }
  fail(ErrorKind::kFormat, "unreachable layer kind");
}

json to_json(const NetworkSpec& spec) {
  json layers = json::array();
  for (const LayerSpec& l : spec.layers) layers.push_back(to_json(l));
  return {{"input_shape", spec.input_shape}, {"timesteps", spec.timesteps}, {"layers", layers}};
}

NetworkSpec network_spec_from_json(const json& j) {
  NetworkSpec spec;
  try {
    spec.input_shape = j.at("input_shape").get<Shape>();
    spec.timesteps = j.at("timesteps").get<std::size_t>();
    for (const json& l : j.at("layers")) spec.layers.push_back(layer_from_json(l));
  } catch (const json::exception& e) {
    fail(ErrorKind::kFormat, std::string("malformed network spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

json to_json(const KDConfig& cfg) {
  return {{"mode", to_string(cfg.mode)},
          {"temperature", cfg.temperature},
          {"loss_alpha", cfg.loss_alpha},
          {"kl_direction", to_string(cfg.kl_direction)},
          {"harmonized", cfg.harmonized}};
}

}  // namespace srkd
