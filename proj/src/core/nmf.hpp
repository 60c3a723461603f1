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

#ifndef SPECON_CORE_NMF_HPP_
#define SPECON_CORE_NMF_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "core/features.hpp"
#include "core/types.hpp"

namespace specon::nmf {

// Nonnegative basis matrix with unit-sum columns.
class Dictionary {
 public:
  explicit Dictionary(Mat u);                 // validates the invariants
  static Dictionary from_columns(const Mat& u);  // renormalizes, then validates

  const Mat& matrix() const { return u_; }
  Eigen::Index dim() const { return u_.rows(); }
  Eigen::Index bases() const { return u_.cols(); }

 private:
  Mat u_;
};

struct SolveOptions {
  int max_iters = 200;
  double sparsity_lambda = 0.0;
  double tol = 1e-12;             // stop when per-frame improvement drops below
  double epsilon_floor = kEpsilonFloor;
};

// Kullback-Leibler divergence sum_m x_m ln(x_m / x̂_m) between unit-sum
// nonnegative vectors, with 0 ln 0 = 0 and x̂ floored at eps.
double kld(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& xhat,
           double eps = kEpsilonFloor);

// Generalized form sum_m x_m ln(x_m / x̂_m) - x_m + x̂_m; valid when x̂ is not
// normalized. Coincides with kld() on unit-sum pairs.
double kld_generalized(const Eigen::Ref<const Vec>& x,
                       const Eigen::Ref<const Vec>& xhat,
                       double eps = kEpsilonFloor);

// Column-mean of kld over paired frames.
double mean_frame_kld(const Mat& x, const Mat& xhat, double eps = kEpsilonFloor);

struct ExemplarDictionaries {
  Dictionary ux;
  Dictionary uy;
  std::vector<size_t> indices;    // selected source frame indices
};

// Draws K distinct source frames (seeded, without replacement) as the source
// dictionary and their aligned target frames as the target dictionary. For a
// fixed seed the selection for a larger K extends that of a smaller K.
ExemplarDictionaries build_exemplar_dictionaries(const Mat& src_frames,
                                                 const Mat& tgt_frames,
                                                 const features::AlignmentMap& align,
                                                 int k, uint64_t seed);

struct SolveResult {
  Mat activation;                 // K x N, nonnegative
  std::vector<double> objective;  // value before iterating, then after each step
  int iterations = 0;
};

// Per-frame activation solving by the multiplicative KL update
//   v <- v .* (Uᵀ (x ./ (U v))) ./ (Uᵀ1 + lambda),
// from a uniform start. The objective (generalized KLD plus lambda * L1) is
// nonincreasing across iterations.
SolveResult solve_activation(const Mat& x, const Dictionary& u, const SolveOptions& opts);

// Solves activations against the source dictionary, renormalizes the columns,
// and decodes them with the target dictionary.
Mat enmf_convert(const Mat& x, const Dictionary& ux, const Dictionary& uy,
                 const SolveOptions& opts);

}  // namespace specon::nmf

#endif  // SPECON_CORE_NMF_HPP_
