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

#ifndef SRKD_GRADCHECK_HPP_
#define SRKD_GRADCHECK_HPP_

#include <functional>

#include "srkd/tensor.hpp"

namespace srkd {

using ScalarFunction = std::function<double(const Tensor&)>;

// Central differences (f(x + eps e_i) - f(x - eps e_i)) / (2 eps) for every
// coordinate of x. Throws a numeric error if f returns a non-finite value.
Tensor finite_diff_grad(const ScalarFunction& f, const Tensor& x, double eps = 1e-5);

// ||a - b||_2 / max(||a||_2, ||b||_2), or 0 when both vectors are zero.
double relative_error(const Tensor& a, const Tensor& b);

// max_i |a_i - b_i|
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace srkd

#endif  // SRKD_GRADCHECK_HPP_
