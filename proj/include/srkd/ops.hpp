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

#ifndef SRKD_OPS_HPP_
#define SRKD_OPS_HPP_

#include <cstddef>
#include <span>

#include "srkd/tensor.hpp"

namespace srkd {

// [m,k] x [k,n] -> [m,n]. Each output element accumulates over k in
// ascending order.
Tensor matmul(const Tensor& a, const Tensor& b);

struct Conv2dGeometry {
  std::size_t stride = 1;
  std::size_t padding = 0;
};

// Cross-correlation (no kernel flip) of input [c_in,h,w] with kernels
// [c_out,c_in,kh,kw], zero padding. Output [c_out,h',w'] with
// h' = (h + 2p - kh) / stride + 1. Accumulation order: c_in, kh, kw ascending.
Tensor conv2d(const Tensor& input, const Tensor& kernels, Conv2dGeometry geom);

// Vector-Jacobian products of conv2d with respect to each operand.
Tensor conv2d_grad_input(const Tensor& grad_out, const Tensor& kernels, const Shape& input_shape,
                         Conv2dGeometry geom);
Tensor conv2d_grad_kernels(const Tensor& grad_out, const Tensor& input, const Shape& kernel_shape,
                           Conv2dGeometry geom);

// q_i = exp(z_i / T) / sum_j exp(z_j / T), evaluated with max subtraction.
Tensor softmax_temperature(const Tensor& logits, double temperature);

// sum_i p_i ln(p_i / q_i) with 0 ln(0/q) = 0. Both arguments must be
// probability vectors (entries >= 0, sum within 1e-9 of 1).
double kl_divergence(const Tensor& p, const Tensor& q);

// -ln(max(probs[label], 1e-12)).
double cross_entropy(const Tensor& probs, std::size_t label);

inline constexpr double kProbabilityFloor = 1e-12;

// Correctly rounded floating-point sum (Shewchuk's exact partials).
double exact_sum(std::span<const double> values);

}  // namespace srkd

#endif  // SRKD_OPS_HPP_
