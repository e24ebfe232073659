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

#include "srkd/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "srkd/error.hpp"

namespace srkd {

const char* to_string(SyntheticKind kind) {
  return kind == SyntheticKind::kBlobs ? "blobs" : "spike-patterns";
}

SyntheticKind synthetic_kind_from_string(const std::string& name) {
  if (name == "blobs") return SyntheticKind::kBlobs;
  if (name == "spike-patterns") return SyntheticKind::kSpikePatterns;
  fail(ErrorKind::kUsage, "unknown synthetic kind '" + name + "' (expected blobs or spike-patterns)");
}

void SyntheticSpec::validate() const {
  if (num_classes < 2) fail(ErrorKind::kUsage, "need at least 2 classes, got " + std::to_string(num_classes));
  if (channels == 0 || height == 0 || width == 0) fail(ErrorKind::kUsage, "sample shape must be positive");
  if (!(noise >= 0.0) || !std::isfinite(noise)) fail(ErrorKind::kUsage, "noise must be >= 0");
  if (kind == SyntheticKind::kSpikePatterns && (timesteps == 0 || window == 0)) {
    fail(ErrorKind::kUsage, "spike-patterns need timesteps >= 1 and window > 0");
  }
}

Tensor blob_template(const SyntheticSpec& spec, std::size_t label) {
  const double side = static_cast<double>(std::min(spec.height, spec.width));
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(label) / static_cast<double>(spec.num_classes);
  const double radius = 0.3 * side;
  const double cy = (static_cast<double>(spec.height) - 1.0) / 2.0 + radius * std::sin(angle);
  const double cx = (static_cast<double>(spec.width) - 1.0) / 2.0 + radius * std::cos(angle);
  const double sigma = 0.15 * side;
  Tensor t({spec.channels, spec.height, spec.width});
  for (std::size_t c = 0; c < spec.channels; ++c) {
    for (std::size_t y = 0; y < spec.height; ++y) {
      for (std::size_t x = 0; x < spec.width; ++x) {
        const double dy = static_cast<double>(y) - cy, dx = static_cast<double>(x) - cx;
        t[(c * spec.height + y) * spec.width + x] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      }
    }
  }
  return t;
}

std::vector<EventRecord> spike_pattern_events(const SyntheticSpec& spec, std::size_t label, Rng& rng) {
  const double h = static_cast<double>(spec.height), w = static_cast<double>(spec.width);
  const double side = std::min(h, w);
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(label) / static_cast<double>(spec.num_classes) +
                       0.5 * spec.noise * rng.normal();
  const double reach = 0.45 * side * rng.uniform(0.8, 1.2);
  const std::uint64_t span = spec.window * spec.timesteps;
  const std::size_t substeps = 4 * spec.timesteps;

  auto pixel = [](double v, double limit) {
    return static_cast<std::uint32_t>(std::clamp(std::lround(v), 0L, static_cast<long>(limit) - 1));
  };

  std::vector<EventRecord> events;
  std::uint32_t px = pixel((w - 1.0) / 2.0, w), py = pixel((h - 1.0) / 2.0, h);
  for (std::size_t m = 0; m < substeps; ++m) {
    const double frac = (static_cast<double>(m) + 0.5) / static_cast<double>(substeps);
    const auto ts = static_cast<std::uint64_t>(frac * static_cast<double>(span));
    const double r = reach * frac;
    const std::uint32_t nx = pixel((w - 1.0) / 2.0 + r * std::cos(angle), w);
    const std::uint32_t ny = pixel((h - 1.0) / 2.0 + r * std::sin(angle), h);
    if (nx != px || ny != py) events.push_back({ts, px, py, 0});
    events.push_back({ts, nx, ny, 1});
    px = nx;
    py = ny;
  }
  const auto n_noise = static_cast<std::size_t>(std::lround(spec.noise * h * w * static_cast<double>(spec.timesteps) / 4.0));
  for (std::size_t i = 0; i < n_noise; ++i) {
    EventRecord e;
    e.t = rng.below(span);
    e.x = static_cast<std::uint32_t>(rng.below(spec.width));
    e.y = static_cast<std::uint32_t>(rng.below(spec.height));
    e.polarity = static_cast<std::uint8_t>(rng.below(2));
    events.push_back(e);
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const EventRecord& a, const EventRecord& b) { return a.t < b.t; });
  return events;
}

DatasetHandle gen_synthetic(const SyntheticSpec& spec, Rng& rng) {
  spec.validate();
  DatasetHandle d;
  d.num_classes = spec.num_classes;
  nlohmann::json source = {{"generator", to_string(spec.kind)},
                           {"classes", spec.num_classes},
                           {"train_per_class", spec.train_per_class},
                           {"test_per_class", spec.test_per_class},
                           {"noise", spec.noise},
                           {"seed", rng.seed()}};
  if (spec.kind == SyntheticKind::kBlobs) {
    d.encoding = Encoding::kStaticCurrent;
    d.sample_shape = {spec.channels, spec.height, spec.width};
    source["shape"] = d.sample_shape;
    std::vector<Tensor> templates;
    for (std::size_t k = 0; k < spec.num_classes; ++k) templates.push_back(blob_template(spec, k));
    auto fill = [&](DatasetSplit& split, std::size_t per_class) {
      for (std::size_t i = 0; i < per_class * spec.num_classes; ++i) {
        const std::size_t label = i % spec.num_classes;
        Tensor s = templates[label];
        for (double& v : s.data()) v = std::clamp(v + spec.noise * rng.normal(), 0.0, 1.0);
        split.samples.push_back(std::move(s));
        split.labels.push_back(static_cast<std::uint32_t>(label));
      }
    };
    fill(d.train, spec.train_per_class);
    fill(d.test, spec.test_per_class);
  } else {
    d.encoding = Encoding::kEventFrames;
    d.sample_shape = {spec.timesteps, 2, spec.height, spec.width};
    source["shape"] = Shape{spec.height, spec.width};
    source["timesteps"] = spec.timesteps;
    source["window"] = spec.window;
    auto fill = [&](DatasetSplit& split, std::size_t per_class) {
      for (std::size_t i = 0; i < per_class * spec.num_classes; ++i) {
        const std::size_t label = i % spec.num_classes;
        const auto events = spike_pattern_events(spec, label, rng);
        split.samples.push_back(integrate_events(events, spec.width, spec.height, spec.timesteps, spec.window));
        split.labels.push_back(static_cast<std::uint32_t>(label));
      }
    };
    fill(d.train, spec.train_per_class);
    fill(d.test, spec.test_per_class);
  }
  d.source = source.dump();
  d.validate();
  return d;
}

}  // namespace srkd
