// Copyright 2026 The specon authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPECON_CORE_TYPES_HPP_
#define SPECON_CORE_TYPES_HPP_

#include <Eigen/Dense>
#include <string>

#include "core/error.hpp"

namespace specon {

// Feature matrices are column-major: one column per frame.
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Floor used inside logarithms and divisions to keep exact zeros finite.
inline constexpr double kEpsilonFloor = 1e-12;
// Tolerance for "columns sum to one" checks.
inline constexpr double kUnitSumTol = 1e-9;

inline bool is_nonnegative(const Mat& m) {
  return m.size() == 0 || m.minCoeff() >= 0.0;
}

inline double max_unit_sum_deviation(const Mat& m) {
  if (m.cols() == 0) return 0.0;
  return (m.colwise().sum().array() - 1.0).abs().maxCoeff();
}

inline void require_unit_columns(const Mat& m, double tol, const std::string& what) {
  require(is_nonnegative(m), ErrorCode::kDomain, what + ": negative entry");
  require(max_unit_sum_deviation(m) <= tol, ErrorCode::kDomain,
          what + ": columns must sum to one");
}

// Rescales every column to unit sum. Throws if a column has a nonpositive sum.
inline Mat normalize_columns(const Mat& m, const std::string& what) {
  Mat out = m;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double s = out.col(c).sum();
    require(s > 0.0, ErrorCode::kDomain,
            what + ": column " + std::to_string(c) + " has nonpositive sum");
    out.col(c) /= s;
  }
  return out;
}

}  // namespace specon

#endif  // SPECON_CORE_TYPES_HPP_
