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

#ifndef SPECON_TESTS_SUPPORT_HPP_
#define SPECON_TESTS_SUPPORT_HPP_

#include <cmath>
#include <cstdint>

#include "core/edn.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"

namespace specon::testing {

inline bool same_matrix(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.size() == 0 || (a.array() == b.array()).all());
}

inline Mat random_unit_columns(Rng& rng, int rows, int cols) {
  Mat m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = rng.uniform() + 1e-2;
    m.col(c) /= m.col(c).sum();
  }
  return m;
}

// Relative error with an absolute fallback below 1e-4 magnitude, matching the
// noise floor of central differences at h = 1e-6 in double precision.
inline double grad_rel_err(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
  return std::abs(analytic - numeric) / denom;
}

struct GradCase {
  Mat x, y;
  edn::EncoderParams theta;
  edn::DecoderParams decoders;
};

// A random configuration placed away from every non-smooth point (relu kinks,
// degenerate fallbacks, the divergence floor) so that central differences are
// trustworthy. Seeds whose draw lands too close to a kink are skipped.
inline GradCase make_grad_case(uint64_t seed, int m, int h1, int h2, int k, int batch) {
  for (uint64_t attempt = 0;; ++attempt) {
    Rng rng(Rng::mix(seed, attempt));
    GradCase gc;
    gc.x = random_unit_columns(rng, m, batch);
    gc.y = random_unit_columns(rng, m, batch);
    gc.theta = edn::init_encoder(m, h1, h2, k, rng.next());
    auto fill_bias = [&rng](Vec& b) {
      for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = 0.1 * rng.gaussian();
    };
    fill_bias(gc.theta.b1);
    fill_bias(gc.theta.b2);
    fill_bias(gc.theta.b3);

    auto draw_pre = [&rng](int rows, int cols) {
      Mat a(rows, cols);
      for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < rows; ++r) {
          const double mag = 0.1 + 0.4 * rng.uniform();
          a(r, c) = rng.uniform() < 0.25 ? -mag : mag;
        }
      }
      return a;
    };
    gc.decoders.ax_pre = draw_pre(m, k);
    gc.decoders.ay_pre = draw_pre(m, k);

    // Margin checks: preactivations off zero, code sums either healthy or
    // exactly dead, reconstructions clear of the log floor.
    const Mat a1 = (gc.theta.w1 * gc.x).colwise() + gc.theta.b1;
    const Mat h1m = a1.cwiseMax(0.0);
    const Mat a2 = (gc.theta.w2 * h1m).colwise() + gc.theta.b2;
    const Mat h2m = a2.cwiseMax(0.0);
    const Mat a3 = (gc.theta.w3 * h2m).colwise() + gc.theta.b3;
    if (a1.cwiseAbs().minCoeff() < 1e-4 || a2.cwiseAbs().minCoeff() < 1e-4 ||
        a3.cwiseAbs().minCoeff() < 1e-4) {
      continue;
    }
    const Vec sums = a3.cwiseMax(0.0).colwise().sum();
    bool ok = true;
    for (Eigen::Index c = 0; c < sums.size(); ++c) {
      if (sums[c] != 0.0 && sums[c] < 1e-3) ok = false;
    }
    if (!ok) continue;

    const Mat v = edn::encoder_forward(gc.x, gc.theta);
    const Mat ux = edn::dict_reparam(gc.decoders.ax_pre);
    const Mat uy = edn::dict_reparam(gc.decoders.ay_pre);
    auto clear_of_floor = [](const Mat& recon) {
      for (Eigen::Index c = 0; c < recon.cols(); ++c) {
        for (Eigen::Index r = 0; r < recon.rows(); ++r) {
          if (recon(r, c) != 0.0 && recon(r, c) < 1e-6) return false;
        }
      }
      return true;
    };
    if (!clear_of_floor(ux * v) || !clear_of_floor(uy * v)) continue;
    return gc;
  }
}

}  // namespace specon::testing

#endif  // SPECON_TESTS_SUPPORT_HPP_
