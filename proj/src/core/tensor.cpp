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

#include "srkd/tensor.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "srkd/error.hpp"

namespace srkd {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace {

void check_shape(const Shape& shape) {
  if (shape.empty()) fail(ErrorKind::kDimension, "tensor shape must have at least one axis");
  for (std::size_t d : shape) {
    if (d == 0) fail(ErrorKind::kDimension, "zero-sized axis in shape " + shape_to_string(shape));
  }
}

}  // namespace

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(shape_numel(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (shape_numel(shape_) != data_.size()) {
    fail(ErrorKind::kDimension, "shape " + shape_to_string(shape_) + " does not match " +
                                    std::to_string(data_.size()) + " values");
  }
}

Tensor Tensor::vector(std::initializer_list<double> values) {
  return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) fail(ErrorKind::kDimension, "ragged matrix literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(data));
}

std::size_t Tensor::offset(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) {
    fail(ErrorKind::kIndex, "index rank " + std::to_string(index.size()) + " for tensor " +
                                shape_to_string(shape_));
  }
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (std::size_t i : index) {
    if (i >= shape_[axis]) fail(ErrorKind::kIndex, "index out of range for " + shape_to_string(shape_));
    flat = flat * shape_[axis] + i;
    ++axis;
  }
  return flat;
}

double& Tensor::at(std::initializer_list<std::size_t> index) { return data_[offset(index)]; }
double Tensor::at(std::initializer_list<std::size_t> index) const { return data_[offset(index)]; }

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_numel(shape) != data_.size()) {
    fail(ErrorKind::kDimension, "cannot reshape " + shape_to_string(shape_) + " to " +
                                    shape_to_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

Tensor Tensor::slice(std::size_t leading_index) const {
  if (shape_.size() < 2) fail(ErrorKind::kDimension, "slice needs rank >= 2");
  if (leading_index >= shape_[0]) fail(ErrorKind::kIndex, "slice index out of range");
  Shape inner(shape_.begin() + 1, shape_.end());
  const std::size_t n = shape_numel(inner);
  auto first = data_.begin() + static_cast<std::ptrdiff_t>(leading_index * n);
  return Tensor(std::move(inner), std::vector<double>(first, first + static_cast<std::ptrdiff_t>(n)));
}

void Tensor::fill(double value) {
  for (double& v : data_) v = value;
}

bool Tensor::all_finite() const noexcept {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_finite(const Tensor& t, const std::string& where) {
  if (!t.all_finite()) fail(ErrorKind::kNumeric, "non-finite value in " + where);
}

void require_same_shape(const Tensor& a, const Tensor& b, const std::string& where) {
  if (a.shape() != b.shape()) {
    fail(ErrorKind::kDimension, where + ": shape " + shape_to_string(a.shape()) + " vs " +
                                    shape_to_string(b.shape()));
  }
}

void add_inplace(Tensor& dst, const Tensor& src) {
  require_same_shape(dst, src, "add");
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

void axpy_inplace(Tensor& dst, double alpha, const Tensor& src) {
  require_same_shape(dst, src, "axpy");
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += alpha * src[i];
}

void scale_inplace(Tensor& dst, double alpha) {
  for (double& v : dst.data()) v *= alpha;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "hadamard");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

double sum(const Tensor& t) {
  double s = 0.0;
  for (double v : t.data()) s += v;
  return s;
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension error";
    case ErrorKind::kParameter: return "parameter error";
    case ErrorKind::kIndex: return "index error";
    case ErrorKind::kNumeric: return "numeric error";
    case ErrorKind::kDivergence: return "divergence-infinite error";
    case ErrorKind::kState: return "state error";
    case ErrorKind::kConfig: return "configuration error";
    case ErrorKind::kUsage: return "usage error";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kIo: return "I/O error";
  }
  return "error";
}

}  // namespace srkd
