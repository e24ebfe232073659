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

#include "srkd/checkpoint.hpp"

#include "binary_io.hpp"
#include "json.hpp"
#include "srkd/error.hpp"
#include "srkd/json_codec.hpp"

namespace srkd {

using nlohmann::json;

namespace {
constexpr char kMagic[4] = {'S', 'R', 'K', 'C'};
}

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  ckpt.spec.validate();
  json tensors = json::array();
  for (std::size_t i = 0; i < ckpt.state.params.size(); ++i) {
    tensors.push_back({{"name", ckpt.state.param_names.at(i)}, {"shape", ckpt.state.params[i].shape()},
                       {"dtype", "f64"}});
  }
  json manifest = {{"format", "srkd-checkpoint"},
                   {"spec", to_json(ckpt.spec)},
                   {"seed", ckpt.seed},
                   {"epoch", ckpt.epoch},
                   {"tensors", tensors},
                   {"meta", json::parse(ckpt.meta)}};
  // IF parameters are echoed once at the top level for readers that only
  // need the neuron model; each if_neuron layer also carries its own.
  for (const LayerSpec& l : ckpt.spec.layers) {
    if (l.kind == LayerKind::kIFNeuron) {
      manifest["if_config"] = to_json(l.neuron);
      break;
    }
  }
  if (ckpt.mask) {
    json masks = json::array();
    for (const auto& e : ckpt.mask->entries) {
      masks.push_back({{"param", e.param_index}, {"shape", e.mask.shape()}, {"dtype", "u8"}});
    }
    manifest["pruning"] = {{"ratio", ckpt.mask->ratio},
                           {"scope", to_string(ckpt.mask->scope)},
                           {"ranking", to_string(ckpt.mask->ranking)},
                           {"masks", masks}};
  }
  const std::string text = manifest.dump();
  detail::ByteWriter w;
  w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(kMagic), 4));
  w.u32(kCheckpointFormatVersion);
  w.u64(text.size());
  w.text(text);
  for (const Tensor& p : ckpt.state.params) {
    for (double v : p.data()) w.f64(v);
  }
  if (ckpt.mask) {
    for (const auto& e : ckpt.mask->entries) {
      for (double v : e.mask.data()) w.u8(v != 0.0 ? 1 : 0);
    }
  }
  return w.buffer();
}

Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes, const std::string& what) {
  detail::ByteReader r(bytes, what);
  if (r.remaining() < 4 || r.text(4) != std::string(kMagic, 4)) r.error("bad magic (expected \"SRKC\")", 0);
  const std::size_t version_at = r.offset();
  const std::uint32_t version = r.u32();
  if (version != kCheckpointFormatVersion) r.error("unsupported version " + std::to_string(version), version_at);
  const std::uint64_t mlen = r.u64();
  const std::size_t manifest_at = r.offset();
  if (mlen > r.remaining()) r.error("manifest length exceeds file", manifest_at);
  json manifest;
  try {
    manifest = json::parse(r.text(mlen));
  } catch (const json::exception& e) {
    r.error(std::string("manifest is not valid JSON (") + e.what() + ")", manifest_at);
  }

  Checkpoint ckpt;
  try {
    ckpt.spec = network_spec_from_json(manifest.at("spec"));
    ckpt.seed = manifest.at("seed").get<std::uint64_t>();
    ckpt.epoch = manifest.at("epoch").get<std::size_t>();
    ckpt.meta = manifest.value("meta", json::object()).dump();
    // Parameter layout is derived from the spec; the blob list must agree.
    Rng unused(0);
    ckpt.state = init_params(ckpt.spec, unused);
    const json& tensors = manifest.at("tensors");
    if (tensors.size() != ckpt.state.params.size()) r.error("tensor count does not match the network spec", manifest_at);
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      if (tensors[i].at("shape").get<Shape>() != ckpt.state.params[i].shape()) {
        r.error("tensor '" + ckpt.state.param_names[i] + "' shape does not match the network spec", manifest_at);
      }
    }
    for (Tensor& p : ckpt.state.params) {
      for (double& v : p.data()) v = r.f64();
    }
    if (manifest.contains("pruning")) {
      PruneMask mask;
      const json& pj = manifest.at("pruning");
      mask.ratio = pj.at("ratio").get<double>();
      mask.scope = prune_scope_from_string(pj.at("scope").get<std::string>());
      mask.ranking = prune_ranking_from_string(pj.at("ranking").get<std::string>());
      for (const json& m : pj.at("masks")) {
        const std::size_t param = m.at("param").get<std::size_t>();
        const Shape shape = m.at("shape").get<Shape>();
        if (param >= ckpt.state.params.size() || ckpt.state.params[param].shape() != shape) {
          r.error("mask refers to an unknown parameter", manifest_at);
        }
        Tensor t(shape);
        for (double& v : t.data()) {
          const std::size_t at = r.offset();
          const std::uint8_t b = r.u8();
          if (b > 1) r.error("mask byte is not 0/1", at);
          v = b;
        }
        mask.entries.push_back({param, std::move(t)});
      }
      attach_mask(ckpt.state, mask);
      ckpt.mask = std::move(mask);
    }
  } catch (const json::exception& e) {
    r.error(std::string("malformed manifest (") + e.what() + ")", manifest_at);
  }
  if (r.remaining() != 0) r.error(std::to_string(r.remaining()) + " trailing bytes", r.offset());
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  detail::write_file_bytes(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
  return deserialize_checkpoint(detail::read_file_bytes(path), path);
}

}  // namespace srkd
