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

#ifndef SRKD_JSON_CODEC_HPP_
#define SRKD_JSON_CODEC_HPP_

#include "json.hpp"
#include "srkd/losses.hpp"
#include "srkd/network.hpp"

namespace srkd {

nlohmann::json to_json(const IFConfig& cfg);
IFConfig if_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LayerSpec& layer);
LayerSpec layer_from_json(const nlohmann::json& j);

nlohmann::json to_json(const NetworkSpec& spec);
NetworkSpec network_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const KDConfig& cfg);

}  // namespace srkd

#endif  // SRKD_JSON_CODEC_HPP_
