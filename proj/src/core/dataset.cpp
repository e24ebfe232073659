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

#include "srkd/dataset.hpp"

#include <string>

#include "binary_io.hpp"
#include "json.hpp"
#include "srkd/error.hpp"
#include "srkd/rng.hpp"

namespace srkd {

using nlohmann::json;

const char* to_string(Encoding encoding) {
  return encoding == Encoding::kStaticCurrent ? "static-current" : "event-frames";
}

Encoding encoding_from_string(const std::string& name) {
  if (name == "static-current") return Encoding::kStaticCurrent;
  if (name == "event-frames") return Encoding::kEventFrames;
  fail(ErrorKind::kFormat, "unknown encoding '" + name + "'");
}

std::size_t default_timesteps(Encoding encoding) {
  return encoding == Encoding::kStaticCurrent ? kDefaultStaticTimesteps : kDefaultEventTimesteps;
}

void DatasetHandle::validate() const {
  if (num_classes < 2) fail(ErrorKind::kValidation, "dataset must declare at least 2 classes");
  if (sample_shape.empty()) fail(ErrorKind::kValidation, "dataset sample shape is empty");
  if (encoding == Encoding::kEventFrames && sample_shape.size() != 4) {
    fail(ErrorKind::kValidation, "event-frame samples must be [T,2,h,w]");
  }
  for (const auto* split : {&train, &test}) {
    const char* name = split == &train ? "train" : "test";
    if (split->samples.size() != split->labels.size()) {
      fail(ErrorKind::kValidation, std::string(name) + " split has mismatched sample/label counts");
    }
    for (std::size_t i = 0; i < split->size(); ++i) {
      if (split->labels[i] >= num_classes) {
        fail(ErrorKind::kValidation, std::string(name) + " label " + std::to_string(split->labels[i]) +
                                         " at index " + std::to_string(i) + " outside [0, " +
                                         std::to_string(num_classes) + ")");
      }
      if (split->samples[i].shape() != sample_shape) {
        fail(ErrorKind::kValidation, std::string(name) + " sample " + std::to_string(i) + " has shape " +
                                         shape_to_string(split->samples[i].shape()));
      }
    }
  }
}

Shape DatasetHandle::step_shape() const {
  if (encoding == Encoding::kStaticCurrent) return sample_shape;
  return Shape(sample_shape.begin() + 1, sample_shape.end());
}

std::size_t DatasetHandle::natural_timesteps() const {
  return encoding == Encoding::kEventFrames ? sample_shape.at(0) : kDefaultStaticTimesteps;
}

Tensor DatasetHandle::network_input(const DatasetSplit& split, std::size_t index,
                                    std::size_t timesteps) const {
  const Tensor& s = split.samples.at(index);
  if (encoding == Encoding::kStaticCurrent) return encode_static(s, timesteps);
  if (s.dim(0) != timesteps) {
    fail(ErrorKind::kConfig, "event-frame data has " + std::to_string(s.dim(0)) +
                                 " frames but the network runs " + std::to_string(timesteps) + " timesteps");
  }
  return s;
}

Tensor encode_static(const Tensor& image, std::size_t timesteps) {
  if (timesteps == 0) fail(ErrorKind::kParameter, "timesteps must be >= 1");
  for (double v : image.data()) {
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorKind::kParameter, "static input out of range [0,1]: " + std::to_string(v));
  }
  Shape shape{timesteps};
  shape.insert(shape.end(), image.shape().begin(), image.shape().end());
  std::vector<double> data;
  data.reserve(timesteps * image.size());
  for (std::size_t t = 0; t < timesteps; ++t) data.insert(data.end(), image.values().begin(), image.values().end());
  return Tensor(std::move(shape), std::move(data));
}

namespace {

constexpr char kMagic[4] = {'S', 'R', 'K', 'D'};

json split_tensors(const char* name, const DatasetSplit& split, const Shape& sample_shape) {
  Shape s{split.size()};
  s.insert(s.end(), sample_shape.begin(), sample_shape.end());
  return json::array({
      {{"name", std::string(name) + ".samples"}, {"dtype", "f64"}, {"shape", s}},
      {{"name", std::string(name) + ".labels"}, {"dtype", "u32"}, {"shape", {split.size()}}},
  });
}

}  // namespace

std::vector<std::uint8_t> serialize_dataset(const DatasetHandle& data) {
  data.validate();
  json manifest;
  manifest["format"] = "srkd-dataset";
  manifest["classes"] = data.num_classes;
  manifest["sample_shape"] = data.sample_shape;
  manifest["encoding"] = to_string(data.encoding);
  manifest["splits"] = {{"train", data.train.size()}, {"test", data.test.size()}};
  manifest["source"] = json::parse(data.source);
  json tensors = split_tensors("train", data.train, data.sample_shape);
  for (auto& t : split_tensors("test", data.test, data.sample_shape)) tensors.push_back(t);
  manifest["tensors"] = tensors;
  const std::string text = manifest.dump();

  detail::ByteWriter w;
  w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(kMagic), 4));
  w.u32(kDatasetFormatVersion);
  w.u64(text.size());
  w.text(text);
  for (const auto* split : {&data.train, &data.test}) {
    for (const Tensor& s : split->samples) {
      for (double v : s.data()) w.f64(v);
    }
    for (std::uint32_t l : split->labels) w.u32(l);
  }
  return w.buffer();
}

void save_dataset(const DatasetHandle& data, const std::string& path) {
  detail::write_file_bytes(path, serialize_dataset(data));
}

DatasetHandle deserialize_dataset(const std::vector<std::uint8_t>& bytes, const std::string& what) {
  detail::ByteReader r(bytes, what);
  if (r.remaining() < 4 || r.text(4) != std::string(kMagic, 4)) r.error("bad magic (expected \"SRKD\")", 0);
  const std::size_t version_at = r.offset();
  const std::uint32_t version = r.u32();
  if (version != kDatasetFormatVersion) r.error("unsupported version " + std::to_string(version), version_at);
  const std::uint64_t mlen = r.u64();
  const std::size_t manifest_at = r.offset();
  if (mlen > r.remaining()) r.error("manifest length " + std::to_string(mlen) + " exceeds file", manifest_at);
  json manifest;
  try {
    manifest = json::parse(r.text(mlen));
  } catch (const json::exception& e) {
    r.error(std::string("manifest is not valid JSON (") + e.what() + ")", manifest_at);
  }

  DatasetHandle d;
  std::size_t n_train = 0, n_test = 0;
  try {
    if (manifest.at("format").get<std::string>() != "srkd-dataset") r.error("manifest format tag", manifest_at);
    d.num_classes = manifest.at("classes").get<std::size_t>();
    d.sample_shape = manifest.at("sample_shape").get<Shape>();
    d.encoding = encoding_from_string(manifest.at("encoding").get<std::string>());
    n_train = manifest.at("splits").at("train").get<std::size_t>();
    n_test = manifest.at("splits").at("test").get<std::size_t>();
    d.source = manifest.value("source", json::object()).dump();
  } catch (const json::exception& e) {
    r.error(std::string("malformed manifest (") + e.what() + ")", manifest_at);
  }
  if (d.sample_shape.empty()) r.error("empty sample shape", manifest_at);
  for (std::size_t dim : d.sample_shape) {
    if (dim == 0) r.error("zero axis in sample shape", manifest_at);
  }
  const std::size_t numel = shape_numel(d.sample_shape);
  for (auto [split, n] : {std::pair{&d.train, n_train}, std::pair{&d.test, n_test}}) {
    r.need(n * numel * 8);
    split->samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> values(numel);
      for (double& v : values) v = r.f64();
      split->samples.emplace_back(d.sample_shape, std::move(values));
    }
    r.need(n * 4);
    split->labels.resize(n);
    for (auto& l : split->labels) l = r.u32();
  }
  if (r.remaining() != 0) r.error(std::to_string(r.remaining()) + " trailing bytes", r.offset());
  d.validate();
  return d;
}

DatasetHandle load_dataset(const std::string& path) {
  return deserialize_dataset(detail::read_file_bytes(path), path);
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  Rng rng(derive_seed(seed, 0x0E90C000ULL + epoch));
  return rng.permutation(n);
}

}  // namespace srkd
