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

#ifndef SRKD_ERROR_HPP_
#define SRKD_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace srkd {

// Failure categories. Each maps onto one CLI exit code (see exit_code()).
enum class ErrorKind {
  kDimension,   // shape mismatch between operands
  kParameter,   // scalar argument outside its domain
  kIndex,       // class/label index out of range
  kNumeric,     // NaN/Inf or non-finite intermediate
  kDivergence,  // KL term is infinite (q == 0 where p > 0)
  kState,       // operation called without its prerequisites
  kConfig,      // inconsistent configuration (e.g. spec mismatch)
  kUsage,       // bad command-line / option input
  kValidation,  // data violates a declared invariant
  kFormat,      // malformed file contents
  kIo,          // file could not be opened/read/written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// 0 success, 1 usage/validation, 2 I/O or format, 3 numeric failure.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
    case ErrorKind::kFormat:
      return 2;
    case ErrorKind::kNumeric:
    case ErrorKind::kDivergence:
      return 3;
    default:
      return 1;
  }
}

const char* to_string(ErrorKind kind);

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace srkd

#endif  // SRKD_ERROR_HPP_
