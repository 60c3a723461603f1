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

#include "core/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "core/features.hpp"
#include "core/format.hpp"
#include "core/nmf.hpp"

namespace specon::eval {

namespace {

std::string fmt_fixed(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%10.6f", v);
  return buf;
}

}  // namespace

McdResult mcd(const Mat& mcc_a, const Mat& mcc_b, bool exclude_c0) {
  require(mcc_a.rows() == mcc_b.rows() && mcc_a.cols() == mcc_b.cols(),
          ErrorCode::kDimension, "mcd: shape mismatch");
  require(mcc_a.cols() > 0, ErrorCode::kInvalidArgument, "mcd: no frames");
  const Eigen::Index start = exclude_c0 ? 1 : 0;
  require(mcc_a.rows() > start, ErrorCode::kInvalidArgument,
          "mcd: not enough coefficients");
  const double scale = 10.0 / std::log(10.0);
  McdResult result;
  result.per_frame_db.resize(mcc_a.cols());
  const Eigen::Index rows = mcc_a.rows() - start;
  for (Eigen::Index n = 0; n < mcc_a.cols(); ++n) {
    const double ss =
        (mcc_a.col(n).tail(rows) - mcc_b.col(n).tail(rows)).squaredNorm();
    result.per_frame_db[n] = scale * std::sqrt(2.0 * ss);
  }
  result.mean_db = result.per_frame_db.mean();
  return result;
}

SparsityStats sparsity_stats(const Mat& v, double zero_tol) {
  require(v.size() > 0, ErrorCode::kInvalidArgument, "sparsity_stats: empty matrix");
  SparsityStats s;
  std::vector<int> active(static_cast<size_t>(v.cols()));
  long zeros = 0;
  double dominance_sum = 0.0;
  long dominated = 0;
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    int count = 0;
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      if (v(r, c) <= zero_tol) {
        ++zeros;
      } else {
        ++count;
      }
    }
    active[static_cast<size_t>(c)] = count;
    const double colsum = v.col(c).sum();
    if (colsum > 0.0) {
      dominance_sum += v.col(c).maxCoeff() / colsum;
      ++dominated;
    }
  }
  s.zero_fraction = static_cast<double>(zeros) / static_cast<double>(v.size());
  s.active_fraction = 1.0 - s.zero_fraction;
  std::vector<int> sorted = active;
  std::sort(sorted.begin(), sorted.end());
  s.min_active = sorted.front();
  s.max_active = sorted.back();
  const size_t n = sorted.size();
  s.median_active = n % 2 == 1
                        ? sorted[n / 2]
                        : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  double mean = 0.0;
  for (int a : active) mean += a;
  s.mean_active = mean / static_cast<double>(n);
  s.dominance = dominated > 0 ? dominance_sum / static_cast<double>(dominated) : 0.0;
  return s;
}

std::vector<SystemReport> compare_systems(
    const std::vector<std::pair<Mat, Mat>>& eval_pairs,
    const std::vector<System>& systems, int mcc_order, int n_mel,
    double sample_rate_hz) {
  require(!eval_pairs.empty(), ErrorCode::kInvalidArgument,
          "compare_systems: no evaluation pairs");
  for (const auto& [src, tgt] : eval_pairs) {
    require(src.cols() == tgt.cols(), ErrorCode::kDimension,
            "compare_systems: pair frame counts differ");
  }

  std::vector<SystemReport> reports;
  for (const System& sys : systems) {
    SystemReport rep;
    rep.label = sys.label;
    double mcd_sum = 0.0, kld_sum = 0.0;
    long frames = 0;
    Mat all_codes;
    for (const auto& [src, tgt] : eval_pairs) {
      const Mat converted = sys.convert(src);
      const Mat mcc_conv = features::mcc_extract(converted, mcc_order, n_mel, sample_rate_hz);
      const Mat mcc_ref = features::mcc_extract(tgt, mcc_order, n_mel, sample_rate_hz);
      const McdResult m = mcd(mcc_conv, mcc_ref);
      const double k = nmf::mean_frame_kld(tgt, converted);
      rep.per_utterance_mcd_db.push_back(m.mean_db);
      rep.per_utterance_kld.push_back(k);
      mcd_sum += m.per_frame_db.sum();
      kld_sum += k * static_cast<double>(src.cols());
      frames += src.cols();
      if (sys.codes) {
        const Mat codes = sys.codes(src);
        const Eigen::Index old = all_codes.cols();
        all_codes.conservativeResize(codes.rows(), old + codes.cols());
        all_codes.rightCols(codes.cols()) = codes;
      }
    }
    rep.mean_mcd_db = mcd_sum / static_cast<double>(frames);
    rep.mean_kld = kld_sum / static_cast<double>(frames);
    if (all_codes.size() > 0) rep.sparsity = sparsity_stats(all_codes);
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::string report_csv(const std::vector<SystemReport>& reports) {
  std::string out = "system,utterance,mcd_db,mean_kld,zero_fraction,mean_active,dominance\n";
  for (const auto& rep : reports) {
    for (size_t i = 0; i < rep.per_utterance_mcd_db.size(); ++i) {
      out += rep.label + "," + std::to_string(i) + "," + format_double(rep.per_utterance_mcd_db[i]) +
             "," + format_double(rep.per_utterance_kld[i]) + ",,,\n";
    }
    out += rep.label + ",mean," + format_double(rep.mean_mcd_db) + "," + format_double(rep.mean_kld) + "," +
           format_double(rep.sparsity.zero_fraction) + "," + format_double(rep.sparsity.mean_active) + "," +
           format_double(rep.sparsity.dominance) + "\n";
  }
  return out;
}

std::string report_table(const std::vector<SystemReport>& reports) {
  std::string out;
  out += "system            mean MCD (dB)   mean KLD     zero frac   mean active\n";
  for (const auto& rep : reports) {
    char label[32];
    std::snprintf(label, sizeof(label), "%-16s", rep.label.c_str());
    out += std::string(label) + fmt_fixed(rep.mean_mcd_db) + "   " +
           fmt_fixed(rep.mean_kld) + "   " + fmt_fixed(rep.sparsity.zero_fraction) +
           "   " + fmt_fixed(rep.sparsity.mean_active) + "\n";
  }
  return out;
}

}  // namespace specon::eval
