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

#include "srkd/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "srkd/error.hpp"

namespace srkd {

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2) fail(ErrorKind::kDimension, "matmul expects rank-2 operands");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    fail(ErrorKind::kDimension, "matmul inner dimensions differ: " + shape_to_string(a.shape()) +
                                    " x " + shape_to_string(b.shape()));
  }
  require_finite(a, "matmul lhs");
  require_finite(b, "matmul rhs");
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
      out[i * n + j] = acc;
    }
  }
  return out;
}

namespace {

struct ConvDims {
  std::size_t c_in, h, w, c_out, kh, kw, oh, ow;
};

ConvDims conv_dims(const Shape& input, const Shape& kernels, Conv2dGeometry geom) {
  if (input.size() != 3) fail(ErrorKind::kDimension, "conv2d input must be [c,h,w]");
  if (kernels.size() != 4) fail(ErrorKind::kDimension, "conv2d kernels must be [c_out,c_in,kh,kw]");
  if (geom.stride == 0) fail(ErrorKind::kParameter, "conv2d stride must be >= 1");
  if (kernels[1] != input[0]) {
    fail(ErrorKind::kDimension, "conv2d channel mismatch: input " + shape_to_string(input) +
                                    ", kernels " + shape_to_string(kernels));
  }
  ConvDims d{input[0], input[1], input[2], kernels[0], kernels[2], kernels[3], 0, 0};
  const std::size_t ph = d.h + 2 * geom.padding, pw = d.w + 2 * geom.padding;
  if (d.kh > ph || d.kw > pw) {
    fail(ErrorKind::kDimension, "conv2d kernel " + shape_to_string(kernels) +
                                    " larger than padded input " + shape_to_string(input));
  }
  d.oh = (ph - d.kh) / geom.stride + 1;
  d.ow = (pw - d.kw) / geom.stride + 1;
  return d;
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernels, Conv2dGeometry geom) {
  const ConvDims d = conv_dims(input.shape(), kernels.shape(), geom);
  require_finite(input, "conv2d input");
  require_finite(kernels, "conv2d kernels");
  Tensor out({d.c_out, d.oh, d.ow});
  const auto pad = static_cast<std::ptrdiff_t>(geom.padding);
  for (std::size_t co = 0; co < d.c_out; ++co) {
    for (std::size_t oy = 0; oy < d.oh; ++oy) {
      for (std::size_t ox = 0; ox < d.ow; ++ox) {
        double acc = 0.0;
        for (std::size_t ci = 0; ci < d.c_in; ++ci) {
          for (std::size_t ky = 0; ky < d.kh; ++ky) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * geom.stride + ky) - pad;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(d.h)) continue;
            for (std::size_t kx = 0; kx < d.kw; ++kx) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * geom.stride + kx) - pad;
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(d.w)) continue;
              acc += input[(ci * d.h + static_cast<std::size_t>(iy)) * d.w + static_cast<std::size_t>(ix)] *
                     kernels[((co * d.c_in + ci) * d.kh + ky) * d.kw + kx];
            }
          }
        }
        out[(co * d.oh + oy) * d.ow + ox] = acc;
      }
    }
  }
  return out;
}

Tensor conv2d_grad_input(const Tensor& grad_out, const Tensor& kernels, const Shape& input_shape,
                         Conv2dGeometry geom) {
  const ConvDims d = conv_dims(input_shape, kernels.shape(), geom);
  if (grad_out.shape() != Shape{d.c_out, d.oh, d.ow}) {
    fail(ErrorKind::kDimension, "conv2d_grad_input: gradient shape " + shape_to_string(grad_out.shape()));
  }
  Tensor grad(input_shape);
  const auto pad = static_cast<std::ptrdiff_t>(geom.padding);
  for (std::size_t co = 0; co < d.c_out; ++co) {
    for (std::size_t oy = 0; oy < d.oh; ++oy) {
      for (std::size_t ox = 0; ox < d.ow; ++ox) {
        const double g = grad_out[(co * d.oh + oy) * d.ow + ox];
        if (g == 0.0) continue;
        for (std::size_t ci = 0; ci < d.c_in; ++ci) {
          for (std::size_t ky = 0; ky < d.kh; ++ky) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * geom.stride + ky) - pad;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(d.h)) continue;
            for (std::size_t kx = 0; kx < d.kw; ++kx) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * geom.stride + kx) - pad;
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(d.w)) continue;
              grad[(ci * d.h + static_cast<std::size_t>(iy)) * d.w + static_cast<std::size_t>(ix)] +=
                  g * kernels[((co * d.c_in + ci) * d.kh + ky) * d.kw + kx];
            }
          }
        }
      }
    }
  }
  return grad;
}

Tensor conv2d_grad_kernels(const Tensor& grad_out, const Tensor& input, const Shape& kernel_shape,
                           Conv2dGeometry geom) {
  const ConvDims d = conv_dims(input.shape(), kernel_shape, geom);
  if (grad_out.shape() != Shape{d.c_out, d.oh, d.ow}) {
    fail(ErrorKind::kDimension, "conv2d_grad_kernels: gradient shape " + shape_to_string(grad_out.shape()));
  }
  Tensor grad(kernel_shape);
  const auto pad = static_cast<std::ptrdiff_t>(geom.padding);
  for (std::size_t co = 0; co < d.c_out; ++co) {
    for (std::size_t oy = 0; oy < d.oh; ++oy) {
      for (std::size_t ox = 0; ox < d.ow; ++ox) {
        const double g = grad_out[(co * d.oh + oy) * d.ow + ox];
        if (g == 0.0) continue;
        for (std::size_t ci = 0; ci < d.c_in; ++ci) {
          for (std::size_t ky = 0; ky < d.kh; ++ky) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * geom.stride + ky) - pad;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(d.h)) continue;
            for (std::size_t kx = 0; kx < d.kw; ++kx) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * geom.stride + kx) - pad;
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(d.w)) continue;
              grad[((co * d.c_in + ci) * d.kh + ky) * d.kw + kx] +=
                  g * input[(ci * d.h + static_cast<std::size_t>(iy)) * d.w + static_cast<std::size_t>(ix)];
            }
          }
        }
      }
    }
  }
  return grad;
}

Tensor softmax_temperature(const Tensor& logits, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    fail(ErrorKind::kParameter, "softmax temperature must be positive, got " + std::to_string(temperature));
  }
  if (logits.rank() != 1) fail(ErrorKind::kDimension, "softmax expects a 1-D tensor");
  require_finite(logits, "softmax input");
  const double zmax = *std::max_element(logits.data().begin(), logits.data().end());
  Tensor out(logits.shape());
  double denom = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - zmax) / temperature);
    denom += out[i];
  }
  for (double& v : out.data()) v /= denom;
  return out;
}

namespace {

void require_probability(const Tensor& p, const char* name) {
  if (p.rank() != 1) fail(ErrorKind::kDimension, std::string(name) + " must be 1-D");
  double s = 0.0;
  for (double v : p.data()) {
    if (!std::isfinite(v) || v < 0.0) fail(ErrorKind::kParameter, std::string(name) + " has a negative or non-finite entry");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) {
    fail(ErrorKind::kParameter, std::string(name) + " sums to " + std::to_string(s) + ", not 1");
  }
}

}  // namespace

double kl_divergence(const Tensor& p, const Tensor& q) {
  require_same_shape(p, q, "kl_divergence");
  require_probability(p, "p");
  require_probability(q, "q");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) fail(ErrorKind::kDivergence, "KL divergence is infinite: q[" + std::to_string(i) + "] == 0");
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(kl, 0.0);
}

double cross_entropy(const Tensor& probs, std::size_t label) {
  if (probs.rank() != 1) fail(ErrorKind::kDimension, "cross_entropy expects a 1-D tensor");
  if (label >= probs.size()) {
    fail(ErrorKind::kIndex, "label " + std::to_string(label) + " out of range for " +
                                std::to_string(probs.size()) + " classes");
  }
  return -std::log(std::max(probs[label], kProbabilityFloor));
}

double exact_sum(std::span<const double> values) {
  // Shewchuk partials with final round-half-even correction, as in
  // Python's math.fsum. Inputs must be finite.
  std::vector<double> partials;
  for (double x : values) {
    std::size_t used = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[used++] = lo;
      x = hi;
    }
    partials.resize(used);
    partials.push_back(x);
  }
  if (partials.empty()) return 0.0;
  std::size_t n = partials.size();
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

}  // namespace srkd
