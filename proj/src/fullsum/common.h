// src/fullsum/common.h
//
// Copyright 2026 The fullsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FULLSUM_COMMON_H_
#define FULLSUM_COMMON_H_

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fullsum {

// Row-major so that a row is one frame.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

enum class ErrorKind { kUsage, kData, kConfig };

// All library failures are reported through this exception; the C API maps
// the kind onto a status code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void DataError(const std::string &what) {
  throw Error(ErrorKind::kData, what);
}
[[noreturn]] inline void ConfigError(const std::string &what) {
  throw Error(ErrorKind::kConfig, what);
}
[[noreturn]] inline void UsageError(const std::string &what) {
  throw Error(ErrorKind::kUsage, what);
}

// log(exp(a) + exp(b)); kLogZero is absorbing.
inline double LogAdd(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kLogZero) return a;
  return a + std::log1p(std::exp(b - a));
}

// Diagnostics on stderr; SetWarningsEnabled(false) silences both.
void Warn(const std::string &msg);
void Info(const std::string &msg);
void SetWarningsEnabled(bool enabled);

}  // namespace fullsum

#endif  // FULLSUM_COMMON_H_
