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

#ifndef SPECON_CORE_EVAL_HPP_
#define SPECON_CORE_EVAL_HPP_

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "core/types.hpp"

namespace specon::eval {

struct McdResult {
  Vec per_frame_db;
  double mean_db = 0.0;
};

// Mel-cepstral distortion per frame: (10 / ln 10) * sqrt(2 * sum_d (c_d - c'_d)^2),
// c0 excluded by default.
McdResult mcd(const Mat& mcc_a, const Mat& mcc_b, bool exclude_c0 = true);

struct SparsityStats {
  double zero_fraction = 0.0;     // entries <= zero_tol, over the whole matrix
  double active_fraction = 0.0;   // complement of zero_fraction
  int min_active = 0;             // per-frame active-basis count distribution
  double median_active = 0.0;
  int max_active = 0;
  double mean_active = 0.0;
  double dominance = 0.0;         // mean of (largest entry / column sum)
};

SparsityStats sparsity_stats(const Mat& v, double zero_tol = 0.0);

struct SystemReport {
  std::string label;
  std::vector<double> per_utterance_mcd_db;
  std::vector<double> per_utterance_kld;
  double mean_mcd_db = 0.0;       // frame-weighted over all utterances
  double mean_kld = 0.0;
  SparsityStats sparsity;
};

// A conversion system under evaluation; codes() is optional and feeds the
// sparsity summary.
struct System {
  std::string label;
  std::function<Mat(const Mat&)> convert;
  std::function<Mat(const Mat&)> codes;
};

// Converts every source utterance with every system and scores it against the
// pre-aligned reference target (equal frame counts). Report order follows the
// input order; repeated runs on identical inputs are identical.
std::vector<SystemReport> compare_systems(
    const std::vector<std::pair<Mat, Mat>>& eval_pairs,
    const std::vector<System>& systems, int mcc_order, int n_mel,
    double sample_rate_hz);

std::string report_csv(const std::vector<SystemReport>& reports);
std::string report_table(const std::vector<SystemReport>& reports);

}  // namespace specon::eval

#endif  // SPECON_CORE_EVAL_HPP_
