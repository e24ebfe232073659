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

// Helpers shared by the unit tests and the acceptance binary. The reference
// functions here are deliberately written independently of the library
// (plain loops, no shared code) so they can serve as oracles.
#ifndef SRKD_TESTS_SUPPORT_HPP_
#define SRKD_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "srkd/error.hpp"
#include "srkd/events.hpp"
#include "srkd/network.hpp"
#include "srkd/rng.hpp"
#include "srkd/tensor.hpp"

namespace srkd::testing {

template <typename F>
bool throws_kind(F&& f, ErrorKind kind) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

inline std::vector<double> ref_softmax(const std::vector<double>& z, double T) {
  // No max shift: only used on moderate logits.
  std::vector<double> e(z.size());
  double s = 0;
  for (std::size_t i = 0; i < z.size(); ++i) s += e[i] = std::exp(z[i] / T);
  for (double& v : e) v /= s;
  return e;
}

inline double ref_kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

inline double ref_ce(const std::vector<double>& q, std::size_t y) { return -std::log(q[y]); }

// sparse loss: a T^2 KL(teacher^T || student^T) + (1 - a) CE(student, y)
inline double ref_sparse_kd(const std::vector<double>& s, const std::vector<double>& t, std::size_t y, double T,
                            double a) {
  return a * T * T * ref_kl(ref_softmax(t, T), ref_softmax(s, T)) + (1 - a) * ref_ce(ref_softmax(s, 1), y);
}

// default loss: a KL(flatten(p, T) || student) + (1 - a) CE(student, y)
inline double ref_default_kd(const std::vector<double>& s, const std::vector<double>& p, std::size_t y, double T,
                             double a) {
  std::vector<double> logp(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) logp[i] = std::log(p[i]);
  const auto student = ref_softmax(s, 1);
  return a * ref_kl(ref_softmax(logp, T), student) + (1 - a) * ref_ce(student, y);
}

inline std::vector<double> ref_central_diff(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

inline double ref_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double den = std::sqrt(std::max(na, nb));
  return den == 0 ? 0 : std::sqrt(d) / den;
}

// Brute-force frame integration: one pass per output cell.
inline std::vector<double> ref_frames(const std::vector<EventRecord>& ev, std::size_t w, std::size_t h,
                                      std::size_t T, std::uint64_t window) {
  std::vector<double> out(T * 2 * h * w, 0.0);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t p = 0; p < 2; ++p)
      for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
          double c = 0;
          for (const EventRecord& e : ev) {
            if (e.polarity == p && e.x == x && e.y == y && e.t >= t * window && e.t < (t + 1) * window) c += 1;
          }
          out[((t * 2 + p) * h + y) * w + x] = c;
        }
  return out;
}

// zeros a pruning call must produce, by sorting (|w|, tensor, index).
inline std::vector<std::pair<std::size_t, std::size_t>> ref_prune_order(const std::vector<const Tensor*>& ts) {
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  for (std::size_t t = 0; t < ts.size(); ++t)
    for (std::size_t i = 0; i < ts[t]->size(); ++i) idx.emplace_back(t, i);
  std::stable_sort(idx.begin(), idx.end(), [&](const auto& a, const auto& b) {
    return std::fabs((*ts[a.first])[a.second]) < std::fabs((*ts[b.first])[b.second]);
  });
  return idx;
}

inline std::vector<EventRecord> random_events(Rng& rng, std::size_t w, std::size_t h, std::size_t n,
                                              std::uint64_t t_max) {
  std::vector<EventRecord> ev(n);
  for (auto& e : ev) {
    e.t = rng.below(t_max);
    e.x = static_cast<std::uint32_t>(rng.below(w));
    e.y = static_cast<std::uint32_t>(rng.below(h));
    e.polarity = static_cast<std::uint8_t>(rng.below(2));
  }
  std::stable_sort(ev.begin(), ev.end(), [](const EventRecord& a, const EventRecord& b) { return a.t < b.t; });
  return ev;
}

inline IFConfig smooth_neuron() {
  IFConfig c;
  c.surrogate = SurrogateKind::kArctangent;
  c.surrogate_slope = 2.0;
  return c;
}

// Small random networks for gradient checks (parameter count <= 1000).
inline NetworkSpec random_mlp_spec(Rng& rng, std::size_t T) {
  const std::size_t in = 3 + rng.below(4), hidden = 4 + rng.below(8), classes = 2 + rng.below(3);
  NetworkSpec s;
  s.input_shape = {in};
  s.timesteps = T;
  s.layers = {LayerSpec::linear(in, hidden), LayerSpec::if_neuron(smooth_neuron()),
              LayerSpec::linear(hidden, hidden), LayerSpec::if_neuron(smooth_neuron()),
              LayerSpec::readout(hidden, classes)};
  return s;
}

inline NetworkSpec random_conv_spec(Rng& rng, std::size_t T) {
  const std::size_t c = 1 + rng.below(2), side = 4 + 2 * rng.below(2), k = 3, oc = 2 + rng.below(2);
  NetworkSpec s;
  s.input_shape = {c, side, side};
  s.timesteps = T;
  const std::size_t pooled = side / 2;
  s.layers = {LayerSpec::conv2d(c, oc, k, 1, 1), LayerSpec::if_neuron(smooth_neuron()), LayerSpec::avgpool(2),
              LayerSpec::flatten(), LayerSpec::linear(oc * pooled * pooled, 6),
              LayerSpec::if_neuron(smooth_neuron()), LayerSpec::readout(6, 3)};
  return s;
}

// Random input sequence [T, ...shape] in [lo, hi).
inline Tensor random_input(Rng& rng, const NetworkSpec& spec, double lo, double hi) {
  Shape shape{spec.timesteps};
  shape.insert(shape.end(), spec.input_shape.begin(), spec.input_shape.end());
  Tensor t(shape);
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

// Scales weights so hidden units sit in the surrogate's sensitive range.
inline void randomize_params(Rng& rng, std::vector<Tensor>& params, double scale) {
  for (Tensor& p : params)
    for (double& v : p.data()) v = rng.uniform(-scale, scale);
}

}  // namespace srkd::testing

#endif  // SRKD_TESTS_SUPPORT_HPP_
