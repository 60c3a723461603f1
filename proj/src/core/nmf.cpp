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

#include "core/nmf.hpp"

#include <cmath>

#include "core/rng.hpp"

namespace specon::nmf {

namespace {

constexpr double kUnitSumPreTol = 1e-6;  // tolerance on caller-provided frames

void check_pair(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& xhat) {
  require(x.size() == xhat.size(), ErrorCode::kDimension, "kld: length mismatch");
  require(x.size() > 0, ErrorCode::kInvalidArgument, "kld: empty vectors");
  require(x.minCoeff() >= 0.0 && xhat.minCoeff() >= 0.0, ErrorCode::kDomain,
          "kld: negative entry");
}

double kld_terms(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& xhat,
                 double eps) {
  double acc = 0.0;
  for (Eigen::Index m = 0; m < x.size(); ++m) {
    if (x[m] > 0.0) acc += x[m] * std::log(x[m] / std::max(xhat[m], eps));
  }
  return acc;
}

}  // namespace

Dictionary::Dictionary(Mat u) : u_(std::move(u)) {
  require(u_.size() > 0, ErrorCode::kInvalidArgument, "dictionary: empty matrix");
  require_unit_columns(u_, kUnitSumTol, "dictionary");
}

Dictionary Dictionary::from_columns(const Mat& u) {
  require(u.size() > 0, ErrorCode::kInvalidArgument, "dictionary: empty matrix");
  require(is_nonnegative(u), ErrorCode::kDomain, "dictionary: negative entry");
  return Dictionary(normalize_columns(u, "dictionary"));
}

double kld(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& xhat,
           double eps) {
  check_pair(x, xhat);
  require(std::abs(x.sum() - 1.0) <= kUnitSumPreTol &&
              std::abs(xhat.sum() - 1.0) <= kUnitSumPreTol,
          ErrorCode::kDomain, "kld: vectors must sum to one");
  return kld_terms(x, xhat, eps);
}

double kld_generalized(const Eigen::Ref<const Vec>& x,
                       const Eigen::Ref<const Vec>& xhat, double eps) {
  check_pair(x, xhat);
  return kld_terms(x, xhat, eps) - x.sum() + xhat.sum();
}

double mean_frame_kld(const Mat& x, const Mat& xhat, double eps) {
  require(x.rows() == xhat.rows() && x.cols() == xhat.cols(), ErrorCode::kDimension,
          "mean_frame_kld: shape mismatch");
  require(x.cols() > 0, ErrorCode::kInvalidArgument, "mean_frame_kld: no frames");
  double acc = 0.0;
  for (Eigen::Index n = 0; n < x.cols(); ++n) acc += kld(x.col(n), xhat.col(n), eps);
  return acc / static_cast<double>(x.cols());
}

ExemplarDictionaries build_exemplar_dictionaries(const Mat& src_frames,
                                                 const Mat& tgt_frames,
                                                 const features::AlignmentMap& align,
                                                 int k, uint64_t seed) {
  const Eigen::Index n = src_frames.cols();
  require(k >= 1, ErrorCode::kInvalidArgument, "exemplar: need k >= 1");
  require(k <= n, ErrorCode::kInvalidArgument,
          "exemplar: k exceeds available source frames");
  require(align.target_index.size() == static_cast<size_t>(n), ErrorCode::kDimension,
          "exemplar: alignment length != source frames");

  Rng rng(seed);
  const auto indices = rng.sample(static_cast<size_t>(n), static_cast<size_t>(k));
  Mat ux(src_frames.rows(), k);
  Mat uy(tgt_frames.rows(), k);
  for (int c = 0; c < k; ++c) {
    const auto src_idx = static_cast<Eigen::Index>(indices[static_cast<size_t>(c)]);
    const int tgt_idx = align.target_index[static_cast<size_t>(src_idx)];
    require(tgt_idx >= 0 && tgt_idx < tgt_frames.cols(), ErrorCode::kDimension,
            "exemplar: alignment index out of range");
    ux.col(c) = src_frames.col(src_idx);
    uy.col(c) = tgt_frames.col(tgt_idx);
  }
  return {Dictionary::from_columns(ux), Dictionary::from_columns(uy), indices};
}

SolveResult solve_activation(const Mat& x, const Dictionary& u, const SolveOptions& opts) {
  require(opts.max_iters >= 1, ErrorCode::kConfig, "solve_activation: max_iters >= 1");
  require(opts.epsilon_floor > 0.0 && opts.sparsity_lambda >= 0.0 && opts.tol >= 0.0,
          ErrorCode::kConfig, "solve_activation: invalid options");
  require(x.rows() == u.dim(), ErrorCode::kDimension,
          "solve_activation: frame dimension != dictionary dimension");
  require(x.cols() > 0, ErrorCode::kInvalidArgument, "solve_activation: no frames");
  require(is_nonnegative(x), ErrorCode::kDomain, "solve_activation: negative entry");
  for (Eigen::Index n = 0; n < x.cols(); ++n) {
    const double s = x.col(n).sum();
    require(s > 0.0, ErrorCode::kDomain, "solve_activation: zero column in input");
    require(std::abs(s - 1.0) <= kUnitSumPreTol, ErrorCode::kDomain,
            "solve_activation: input columns must sum to one");
  }

  const Eigen::Index k = u.bases();
  const Eigen::Index n = x.cols();
  const double eps = opts.epsilon_floor;
  const double lambda = opts.sparsity_lambda;
  const Mat& basis = u.matrix();
  const Vec denom = (basis.colwise().sum().transpose().array() + lambda).matrix();

  Mat v = Mat::Constant(k, n, 1.0 / static_cast<double>(k));

  auto objective = [&](const Mat& act) {
    const Mat recon = basis * act;
    double obj = lambda * act.sum();
    for (Eigen::Index c = 0; c < n; ++c) {
      obj += kld_generalized(x.col(c), recon.col(c), eps);
    }
    return obj;
  };

  SolveResult result;
  result.objective.push_back(objective(v));
  for (int it = 0; it < opts.max_iters; ++it) {
    const Mat recon = (basis * v).cwiseMax(eps);
    const Mat ratio = x.cwiseQuotient(recon);
    v.array() *= (basis.transpose() * ratio).array();
    v.array().colwise() /= denom.array();
    result.iterations = it + 1;
    result.objective.push_back(objective(v));
    const size_t t = result.objective.size();
    const double gain = result.objective[t - 2] - result.objective[t - 1];
    if (gain / static_cast<double>(n) < opts.tol) break;
  }
  result.activation = std::move(v);
  return result;
}

Mat enmf_convert(const Mat& x, const Dictionary& ux, const Dictionary& uy,
                 const SolveOptions& opts) {
  require(ux.bases() == uy.bases(), ErrorCode::kDimension,
          "enmf_convert: dictionaries disagree on basis count");
  SolveResult solved = solve_activation(x, ux, opts);
  const Mat v = normalize_columns(solved.activation, "enmf_convert: activation");
  return uy.matrix() * v;
}

}  // namespace specon::nmf
