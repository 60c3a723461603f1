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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "core/edn.hpp"
#include "core/features.hpp"
#include "core/nmf.hpp"
#include "core/rng.hpp"
#include "support.hpp"

using namespace specon;
using namespace specon::edn;
using specon::testing::GradCase;
using specon::testing::grad_rel_err;
using specon::testing::make_grad_case;
using specon::testing::same_matrix;
using specon::testing::random_unit_columns;

namespace {

constexpr double kFdStep = 1e-6;
constexpr double kFdTol = 1e-4;

template <typename T>
void check_tensor_fd(T& tensor, const Mat& analytic, const std::function<double()>& eval) {
  REQUIRE(analytic.rows() == tensor.rows());
  REQUIRE(analytic.cols() == tensor.cols());
  for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
    for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
      const double orig = tensor(r, c);
      tensor(r, c) = orig + kFdStep;
      const double up = eval();
      tensor(r, c) = orig - kFdStep;
      const double down = eval();
      tensor(r, c) = orig;
      const double fd = (up - down) / (2.0 * kFdStep);
      CHECK(grad_rel_err(analytic(r, c), fd) <= kFdTol);
    }
  }
}

void check_stage2_fd(GradCase gc, double alpha) {
  const Gradients g =
      compute_gradients_stage2(gc.x, gc.y, gc.theta, gc.decoders, alpha);
  REQUIRE(g.has_decoder_grads);
  auto eval = [&]() {
    return loss_stage2(gc.x, gc.y, gc.theta, gc.decoders, alpha);
  };
  CHECK(g.loss == doctest::Approx(eval()).epsilon(1e-12));
  check_tensor_fd(gc.theta.w1, g.w1, eval);
  check_tensor_fd(gc.theta.w2, g.w2, eval);
  check_tensor_fd(gc.theta.w3, g.w3, eval);
  check_tensor_fd(gc.theta.b1, Mat(g.b1), eval);
  check_tensor_fd(gc.theta.b2, Mat(g.b2), eval);
  check_tensor_fd(gc.theta.b3, Mat(g.b3), eval);
  check_tensor_fd(gc.decoders.ax_pre, g.ax_pre, eval);
  check_tensor_fd(gc.decoders.ay_pre, g.ay_pre, eval);
}

}  // namespace

TEST_CASE("an all-zero encoder produces the uniform fallback code") {
  EncoderParams theta;
  theta.w1 = Mat::Zero(4, 3);
  theta.w2 = Mat::Zero(4, 4);
  theta.w3 = Mat::Zero(5, 4);
  theta.b1 = Vec::Zero(4);
  theta.b2 = Vec::Zero(4);
  theta.b3 = Vec::Zero(5);
  Rng rng(1);
  const Mat x = random_unit_columns(rng, 3, 6);
  const Mat v = encoder_forward(x, theta);
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      CHECK(v(r, c) == doctest::Approx(0.2));
    }
  }
  CHECK(encoder_prenorm_codes(x, theta).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("encoder codes are nonnegative with unit-sum columns") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Mat x = random_unit_columns(rng, 8, 12);
    const EncoderParams theta = init_encoder(8, 6, 7, 5, rng.next());
    const Mat v = encoder_forward(x, theta);
    CHECK(is_nonnegative(v));
    CHECK(max_unit_sum_deviation(v) <= 1e-9);
  }
}

TEST_CASE("encoder forward matches a straight-line re-evaluation") {
  Rng rng(42);
  const int m = 5, h1 = 4, h2 = 6, k = 3;
  const Mat x = random_unit_columns(rng, m, 5);
  EncoderParams theta = init_encoder(m, h1, h2, k, 7);
  for (Eigen::Index i = 0; i < theta.b1.size(); ++i) theta.b1[i] = 0.05 * rng.gaussian();
  for (Eigen::Index i = 0; i < theta.b3.size(); ++i) theta.b3[i] = 0.05 * rng.gaussian();

  const Mat v = encoder_forward(x, theta);
  for (Eigen::Index n = 0; n < x.cols(); ++n) {
    double a1[16], a2[16], a3[16];
    for (int i = 0; i < h1; ++i) {
      a1[i] = theta.b1[i];
      for (int j = 0; j < m; ++j) a1[i] += theta.w1(i, j) * x(j, n);
      a1[i] = std::max(a1[i], 0.0);
    }
    for (int i = 0; i < h2; ++i) {
      a2[i] = theta.b2[i];
      for (int j = 0; j < h1; ++j) a2[i] += theta.w2(i, j) * a1[j];
      a2[i] = std::max(a2[i], 0.0);
    }
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      a3[i] = theta.b3[i];
      for (int j = 0; j < h2; ++j) a3[i] += theta.w3(i, j) * a2[j];
      a3[i] = std::max(a3[i], 0.0);
      total += a3[i];
    }
    for (int i = 0; i < k; ++i) {
      const double expected = total < 1e-12 ? 1.0 / k : a3[i] / total;
      CHECK(v(i, n) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("dictionary reparameterization fixes nonnegative unit-sum input") {
  Rng rng(3);
  const Mat u = random_unit_columns(rng, 6, 4);
  CHECK((dict_reparam(u) - u).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("dictionary reparameterization rectifies and normalizes") {
  Mat a(2, 1);
  a << -1.0, -2.0;
  const Mat u = dict_reparam(a);
  CHECK(u(0, 0) == doctest::Approx(0.5));
  CHECK(u(1, 0) == doctest::Approx(0.5));

  Mat b(3, 1);
  b << 2.0, -1.0, 2.0;
  const Mat ub = dict_reparam(b);
  CHECK(ub(0, 0) == doctest::Approx(0.5));
  CHECK(ub(1, 0) == 0.0);
  CHECK(ub(2, 0) == doctest::Approx(0.5));
}

TEST_CASE("decoding selects and averages dictionary columns") {
  Rng rng(4);
  const nmf::Dictionary u(random_unit_columns(rng, 7, 4));
  Mat onehot = Mat::Zero(4, 4);
  onehot.diagonal().setOnes();
  CHECK((decode(onehot, u) - u.matrix()).cwiseAbs().maxCoeff() <= 1e-15);

  const Mat uniform = Mat::Constant(4, 1, 0.25);
  const Mat mean = decode(uniform, u);
  CHECK((mean - u.matrix().rowwise().mean()).cwiseAbs().maxCoeff() <= 1e-15);

  for (uint64_t seed = 0; seed < 100; ++seed) {
    Rng r2(seed);
    const Mat v = random_unit_columns(r2, 4, 3);
    CHECK(max_unit_sum_deviation(decode(v, u)) <= 1e-9);
  }
  CHECK_THROWS_AS(decode(Mat::Zero(5, 2), u), Error);
}

TEST_CASE("stage-1 loss vanishes for a perfect single-basis dictionary") {
  Rng rng(5);
  const Mat column = random_unit_columns(rng, 6, 1);
  Mat batch(6, 4);
  for (int c = 0; c < 4; ++c) batch.col(c) = column.col(0);
  const nmf::Dictionary ux(column);
  const EncoderParams theta = init_encoder(6, 5, 5, 1, 11);
  CHECK(loss_stage1(batch, theta, ux) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("stage-1 loss is the mean of per-frame divergences") {
  Rng rng(6);
  const Mat x = random_unit_columns(rng, 5, 3);
  const nmf::Dictionary ux(random_unit_columns(rng, 5, 4));
  const EncoderParams theta = init_encoder(5, 4, 4, 4, 13);
  const Mat v = encoder_forward(x, theta);
  double expected = 0.0;
  for (int n = 0; n < 3; ++n) {
    expected += nmf::kld(x.col(n), (ux.matrix() * v.col(n)).eval());
  }
  expected /= 3.0;
  CHECK(loss_stage1(x, theta, ux) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(loss_stage1(x, theta, ux) >= 0.0);
}

TEST_CASE("stage-2 loss interpolates linearly between its boundary losses") {
  const GradCase gc = make_grad_case(31, 6, 5, 5, 4, 3);
  const double at1 = loss_stage2(gc.x, gc.y, gc.theta, gc.decoders, 1.0);
  const double at0 = loss_stage2(gc.x, gc.y, gc.theta, gc.decoders, 0.0);
  const double mid = loss_stage2(gc.x, gc.y, gc.theta, gc.decoders, 0.5);
  CHECK(mid == doctest::Approx(0.5 * (at0 + at1)).epsilon(1e-12));

  const nmf::Dictionary ux_eff(dict_reparam(gc.decoders.ax_pre));
  CHECK(at1 == doctest::Approx(loss_stage1(gc.x, gc.theta, ux_eff)).epsilon(1e-12));
  CHECK_THROWS_AS(
      loss_stage2(gc.x, gc.y.leftCols(2), gc.theta, gc.decoders, 0.5), Error);
}

TEST_CASE("analytic gradients match central finite differences") {
  check_stage2_fd(make_grad_case(101, 6, 5, 4, 4, 3), 0.3);
  check_stage2_fd(make_grad_case(102, 5, 4, 5, 3, 2), 0.15);

  GradCase gc = make_grad_case(103, 7, 6, 5, 4, 3);
  const Gradients g1 = compute_gradients_stage1(gc.x, gc.theta, nmf::Dictionary(
      dict_reparam(gc.decoders.ax_pre)));
  CHECK_FALSE(g1.has_decoder_grads);
  CHECK(g1.ax_pre.size() == 0);
  const nmf::Dictionary ux_eff(dict_reparam(gc.decoders.ax_pre));
  auto eval = [&]() { return loss_stage1(gc.x, gc.theta, ux_eff); };
  check_tensor_fd(gc.theta.w1, g1.w1, eval);
  check_tensor_fd(gc.theta.w3, g1.w3, eval);
  check_tensor_fd(gc.theta.b2, Mat(g1.b2), eval);
}

TEST_CASE("gradients vanish at a perfect interior reconstruction") {
  // Single basis equal to the (constant) input: v = 1 regardless of theta,
  // and both decoders reproduce their targets exactly.
  Rng rng(7);
  const Mat column = random_unit_columns(rng, 4, 1);
  Mat x(4, 3);
  for (int c = 0; c < 3; ++c) x.col(c) = column.col(0);
  const EncoderParams theta = init_encoder(4, 4, 4, 1, 17);
  DecoderParams dec{column, column};
  const Gradients g = compute_gradients_stage2(x, x, theta, dec, 0.3);
  CHECK(g.loss == doctest::Approx(0.0).epsilon(1e-12));
  for (const Mat* t : {&g.w1, &g.w2, &g.w3, &g.ax_pre, &g.ay_pre}) {
    CHECK(t->cwiseAbs().maxCoeff() <= 1e-9);
  }
  CHECK(g.b1.cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(g.b3.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("dead codes stop encoder gradients but not dictionary gradients") {
  GradCase gc = make_grad_case(201, 5, 4, 4, 3, 2);
  gc.theta.w3.setZero();
  gc.theta.b3.setConstant(-1.0);  // every code column on the uniform fallback
  const Gradients g = compute_gradients_stage2(gc.x, gc.y, gc.theta, gc.decoders, 0.4);
  CHECK(g.w1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.w2.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.w3.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.b3.cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.ax_pre.cwiseAbs().maxCoeff() > 0.0);
  auto eval = [&]() { return loss_stage2(gc.x, gc.y, gc.theta, gc.decoders, 0.4); };
  check_tensor_fd(gc.decoders.ax_pre, g.ax_pre, eval);
}

TEST_CASE("all-nonpositive dictionary columns receive zero gradient") {
  GradCase gc = make_grad_case(202, 5, 4, 4, 3, 2);
  gc.decoders.ax_pre.col(1).setConstant(-0.5);
  const Gradients g = compute_gradients_stage2(gc.x, gc.y, gc.theta, gc.decoders, 0.4);
  CHECK(g.ax_pre.col(1).cwiseAbs().maxCoeff() == 0.0);
  const Mat ux = dict_reparam(gc.decoders.ax_pre);
  for (int r = 0; r < 5; ++r) CHECK(ux(r, 1) == doctest::Approx(0.2));
}

TEST_CASE("adam leaves parameters alone under zero gradients") {
  Mat p = Mat::Constant(3, 2, 1.5);
  const Mat p0 = p;
  const Mat zero = Mat::Zero(3, 2);
  AdamMoments<Mat> state{zero, zero};
  for (long t = 1; t <= 5; ++t) {
    adam_update(p, zero, state, t, 0.01, 0.9, 0.999, 1e-8);
  }
  CHECK(same_matrix(p, p0));
}

TEST_CASE("the first adam step moves by lr * g / (|g| + eps)") {
  Mat p = Mat::Zero(1, 1);
  Mat g = Mat::Constant(1, 1, 0.37);
  AdamMoments<Mat> state{Mat::Zero(1, 1), Mat::Zero(1, 1)};
  const double lr = 0.01, eps = 1e-8;
  adam_update(p, g, state, 1, lr, 0.9, 0.999, eps);
  CHECK(p(0, 0) == doctest::Approx(-lr * 0.37 / (0.37 + eps)).epsilon(1e-12));
}

TEST_CASE("under a constant gradient the adam step size approaches lr") {
  Mat p = Mat::Zero(1, 1);
  const Mat g = Mat::Constant(1, 1, -2.5);
  AdamMoments<Mat> state{Mat::Zero(1, 1), Mat::Zero(1, 1)};
  double prev = 0.0, step = 0.0;
  const double lr = 0.003;
  for (long t = 1; t <= 1000; ++t) {
    adam_update(p, g, state, t, lr, 0.9, 0.999, 1e-8);
    step = p(0, 0) - prev;
    prev = p(0, 0);
  }
  CHECK(std::abs(std::abs(step) - lr) <= 1e-3 * lr);
  CHECK(step > 0.0);  // negative gradient moves the parameter up
}

TEST_CASE("zero-epoch training is a no-op") {
  Rng rng(8);
  const Mat x = random_unit_columns(rng, 6, 20);
  const nmf::Dictionary ux(random_unit_columns(rng, 6, 4));
  EncoderParams theta = init_encoder(6, 5, 5, 4, 19);
  TrainConfig cfg;
  cfg.stage1_epochs = 0;
  cfg.stage2_epochs = 0;
  const EncoderParams after = train_stage1(x, theta, ux, cfg, nullptr);
  CHECK(same_matrix(after.w1, theta.w1));
  CHECK(same_matrix(after.b3, theta.b3));
  DecoderParams dec{ux.matrix(), ux.matrix()};
  const auto [t2, d2] = train_stage2(x, x, theta, dec, cfg, nullptr);
  CHECK(same_matrix(t2.w2, theta.w2));
  CHECK(same_matrix(d2.ax_pre, dec.ax_pre));
}

TEST_CASE("stage-1 training reduces the loss and is seed-deterministic") {
  features::SynthConfig sc;
  sc.dim = 12;
  sc.bases = 4;
  sc.train_utterances = 2;
  sc.eval_utterances = 0;
  sc.frames_per_utterance = 60;
  const auto corpus = features::synth_corpus(sc, 3);
  Mat frames(12, 120);
  for (int i = 0; i < 2; ++i) {
    const auto norm = features::normalize_utterance(corpus.src[i], 40.0);
    frames.middleCols(60 * i, 60) = norm.frames;
  }
  const nmf::Dictionary ux(corpus.truth_ux);
  TrainConfig cfg;
  cfg.batch_size = 32;
  cfg.stage1_epochs = 20;
  cfg.rng_seed = 5;
  const EncoderParams theta0 = init_encoder(12, 16, 16, 4, 23);

  std::vector<TrainLogRow> log;
  const EncoderParams a = train_stage1(frames, theta0, ux, cfg, &log);
  REQUIRE(log.size() == 20);
  CHECK(log.back().loss < log.front().loss);
  CHECK(log.back().stage == 1);
  CHECK(log.back().lr == cfg.stage1_lr);

  // Ten-epoch windows: the last window's mean does not exceed the first's.
  double first = 0.0, last = 0.0;
  for (int i = 0; i < 10; ++i) {
    first += log[i].loss;
    last += log[10 + i].loss;
  }
  CHECK(last <= first);

  const EncoderParams b = train_stage1(frames, theta0, ux, cfg, nullptr);
  CHECK(same_matrix(a.w1, b.w1));
  CHECK(same_matrix(a.w3, b.w3));
  CHECK(same_matrix(a.b2, b.b2));
}

TEST_CASE("alpha = 1 keeps the target dictionary fixed in stage 2") {
  GradCase gc = make_grad_case(301, 6, 5, 5, 4, 4);
  TrainConfig cfg;
  cfg.alpha = 1.0;
  cfg.batch_size = 2;
  cfg.stage2_epochs = 3;
  cfg.rng_seed = 9;
  const Mat ay0 = gc.decoders.ay_pre;
  const auto [theta2, dec2] = train_stage2(gc.x, gc.y, gc.theta, gc.decoders, cfg, nullptr);
  CHECK(same_matrix(dec2.ay_pre, ay0));
  CHECK(!same_matrix(dec2.ax_pre, gc.decoders.ax_pre));
}

TEST_CASE("stage-2 training is seed-deterministic") {
  GradCase gc = make_grad_case(302, 6, 5, 5, 4, 6);
  TrainConfig cfg;
  cfg.batch_size = 3;
  cfg.stage2_epochs = 4;
  cfg.rng_seed = 21;
  std::vector<TrainLogRow> log;
  const auto [ta, da] = train_stage2(gc.x, gc.y, gc.theta, gc.decoders, cfg, &log);
  const auto [tb, db] = train_stage2(gc.x, gc.y, gc.theta, gc.decoders, cfg, nullptr);
  CHECK(same_matrix(ta.w1, tb.w1));
  CHECK(same_matrix(da.ax_pre, db.ax_pre));
  CHECK(same_matrix(da.ay_pre, db.ay_pre));
  REQUIRE(log.size() == 4);
  CHECK(log[0].stage == 2);
  CHECK(log[0].lr == cfg.stage2_lr);
}

TEST_CASE("the stage-2 learning rate decays stepwise at the configured epochs") {
  GradCase gc = make_grad_case(303, 5, 4, 4, 3, 4);
  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.stage2_epochs = 8;
  cfg.lr_decay_every_epochs = 2;
  cfg.max_lr_decays = 2;
  cfg.stage2_lr = 0.01;
  cfg.lr_decay_factor = 0.1;
  std::vector<TrainLogRow> log;
  train_stage2(gc.x, gc.y, gc.theta, gc.decoders, cfg, &log);
  REQUIRE(log.size() == 8);
  CHECK(log[0].lr == doctest::Approx(0.01));
  CHECK(log[1].lr == doctest::Approx(0.01));
  CHECK(log[2].lr == doctest::Approx(0.001));
  CHECK(log[3].lr == doctest::Approx(0.001));
  CHECK(log[4].lr == doctest::Approx(0.0001));
  CHECK(log[6].lr == doctest::Approx(0.0001));  // capped at two decays
  CHECK(log[7].lr == doctest::Approx(0.0001));
}

TEST_CASE("conversion is the composition of encoding and decoding") {
  Rng rng(9);
  const Mat x = random_unit_columns(rng, 7, 5);
  const EncoderParams theta = init_encoder(7, 6, 6, 4, 29);
  const nmf::Dictionary uy(random_unit_columns(rng, 7, 4));
  const Mat direct = edn_convert(x, theta, uy);
  const Mat composed = decode(encoder_forward(x, theta), uy);
  CHECK(same_matrix(direct, composed));
  CHECK(is_nonnegative(direct));
  CHECK(max_unit_sum_deviation(direct) <= 1e-9);
}

TEST_CASE("the encoder is continuous: tiny input changes move codes slightly") {
  Rng rng(10);
  const Mat x = random_unit_columns(rng, 8, 1);
  const EncoderParams theta = init_encoder(8, 16, 16, 6, 31);
  Mat x2 = x;
  x2(3, 0) += 1e-8;
  const Mat v1 = encoder_forward(x, theta);
  const Mat v2 = encoder_forward(x2, theta);
  CHECK((v1 - v2).cwiseAbs().sum() < 1e-4);
}
