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

#include "core/edn.hpp"

#include <cmath>
#include <string>

#include "core/rng.hpp"

namespace specon::edn {

namespace {

constexpr double kUnitSumPreTol = 1e-6;

void check_encoder(const EncoderParams& theta) {
  require(theta.w1.rows() == theta.b1.size() && theta.w2.rows() == theta.b2.size() &&
              theta.w3.rows() == theta.b3.size() &&
              theta.w2.cols() == theta.w1.rows() && theta.w3.cols() == theta.w2.rows(),
          ErrorCode::kDimension, "encoder: layer dimensions do not chain");
}

struct Forward {
  Mat a1, h1, a2, h2, a3, z;
  Vec colsum;
  Mat v;
  std::vector<uint8_t> degenerate;
};

Forward run_forward(const Mat& x, const EncoderParams& theta) {
  Forward f;
  f.a1 = (theta.w1 * x).colwise() + theta.b1;
  f.h1 = f.a1.cwiseMax(0.0);
  f.a2 = (theta.w2 * f.h1).colwise() + theta.b2;
  f.h2 = f.a2.cwiseMax(0.0);
  f.a3 = (theta.w3 * f.h2).colwise() + theta.b3;
  f.z = f.a3.cwiseMax(0.0);
  f.colsum = f.z.colwise().sum();
  f.v = f.z;
  f.degenerate.assign(static_cast<size_t>(x.cols()), 0);
  const double uniform = 1.0 / static_cast<double>(f.z.rows());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (f.colsum[c] < kEpsilonFloor) {
      f.v.col(c).setConstant(uniform);
      f.degenerate[static_cast<size_t>(c)] = 1;
    } else {
      f.v.col(c) /= f.colsum[c];
    }
  }
  return f;
}

// Mean over columns of sum_m x ln(x / max(xhat, eps)), with 0 ln 0 = 0.
double batch_mean_kld(const Mat& x, const Mat& xhat) {
  const auto ratio = x.array() / xhat.array().max(kEpsilonFloor);
  const double total = (x.array() > 0.0).select(x.array() * ratio.log(), 0.0).sum();
  return total / static_cast<double>(x.cols());
}

// d/dxhat of the scaled divergence: -scale * x / xhat above the floor, 0 below.
Mat kld_grad(const Mat& x, const Mat& xhat, double scale) {
  return (xhat.array() > kEpsilonFloor)
      .select(-scale * x.array() / xhat.array(), 0.0)
      .matrix();
}

// Backward through column-wise relu + unit-sum normalization: for u = r / sum(r)
// the chain rule gives g_r = (g_u - <g_u, u>) / sum(r), masked by the relu.
// Columns on the uniform fallback contribute nothing.
Mat reparam_backward(const Mat& a_pre, const Mat& u_eff, const Mat& gu) {
  Mat ga = Mat::Zero(a_pre.rows(), a_pre.cols());
  for (Eigen::Index k = 0; k < a_pre.cols(); ++k) {
    const double total = a_pre.col(k).cwiseMax(0.0).sum();
    if (total < kEpsilonFloor) continue;
    const double mix = gu.col(k).dot(u_eff.col(k));
    ga.col(k) = (a_pre.col(k).array() > 0.0)
                    .select((gu.col(k).array() - mix) / total, 0.0)
                    .matrix();
  }
  return ga;
}

// Shared stage-1/stage-2 backward pass. y, uy_eff, ax_pre, ay_pre are null in
// stage 1, where the dictionary is a constant.
Gradients backward(const Mat& x, const Mat* y, const EncoderParams& theta,
                   const Mat& ux_eff, const Mat* uy_eff, const Mat* ax_pre,
                   const Mat* ay_pre, double alpha) {
  const Forward f = run_forward(x, theta);
  const double batch = static_cast<double>(x.cols());

  const Mat xhat = ux_eff * f.v;
  const double recon = batch_mean_kld(x, xhat);
  Mat yhat;
  double conv = 0.0;
  if (y != nullptr) {
    yhat = *uy_eff * f.v;
    conv = batch_mean_kld(*y, yhat);
  }
  const double loss = y != nullptr ? alpha * recon + (1.0 - alpha) * conv : recon;
  require(std::isfinite(loss), ErrorCode::kNumeric,
          "gradients: non-finite loss (recon=" + std::to_string(recon) +
              ", conv=" + std::to_string(conv) + ")");

  const Mat gxhat = kld_grad(x, xhat, (y != nullptr ? alpha : 1.0) / batch);
  Mat gv = ux_eff.transpose() * gxhat;
  Mat gyhat;
  if (y != nullptr) {
    gyhat = kld_grad(*y, yhat, (1.0 - alpha) / batch);
    gv += uy_eff->transpose() * gyhat;
  }

  // Unit-sum normalization backward (same quotient rule as the dictionaries).
  Mat gz = Mat::Zero(gv.rows(), gv.cols());
  for (Eigen::Index c = 0; c < gv.cols(); ++c) {
    if (f.degenerate[static_cast<size_t>(c)]) continue;
    const double mix = gv.col(c).dot(f.v.col(c));
    gz.col(c) = (gv.col(c).array() - mix) / f.colsum[c];
  }

  Gradients g;
  const Mat ga3 = (f.a3.array() > 0.0).select(gz.array(), 0.0).matrix();
  g.w3 = ga3 * f.h2.transpose();
  g.b3 = ga3.rowwise().sum();
  const Mat gh2 = theta.w3.transpose() * ga3;
  const Mat ga2 = (f.a2.array() > 0.0).select(gh2.array(), 0.0).matrix();
  g.w2 = ga2 * f.h1.transpose();
  g.b2 = ga2.rowwise().sum();
  const Mat gh1 = theta.w2.transpose() * ga2;
  const Mat ga1 = (f.a1.array() > 0.0).select(gh1.array(), 0.0).matrix();
  g.w1 = ga1 * x.transpose();
  g.b1 = ga1.rowwise().sum();

  if (y != nullptr) {
    g.ax_pre = reparam_backward(*ax_pre, ux_eff, gxhat * f.v.transpose());
    g.ay_pre = reparam_backward(*ay_pre, *uy_eff, gyhat * f.v.transpose());
    g.has_decoder_grads = true;
  }
  g.loss = loss;
  g.recon_term = recon;
  g.conv_term = conv;
  return g;
}

void check_stage2_shapes(const Mat& x, const Mat& y, const EncoderParams& theta,
                         const DecoderParams& dec) {
  check_encoder(theta);
  require(x.cols() == y.cols(), ErrorCode::kDimension,
          "stage2: source/target pair counts differ");
  require(x.rows() == theta.input_dim(), ErrorCode::kDimension,
          "stage2: frame dimension != encoder input");
  require(dec.ax_pre.rows() == x.rows() && dec.ay_pre.rows() == y.rows() &&
              dec.ax_pre.cols() == theta.code_dim() &&
              dec.ay_pre.cols() == theta.code_dim(),
          ErrorCode::kDimension, "stage2: dictionary shapes disagree");
}

struct EncoderMoments {
  AdamMoments<Mat> w1, w2, w3;
  AdamMoments<Vec> b1, b2, b3;

  explicit EncoderMoments(const EncoderParams& p)
      : w1{Mat::Zero(p.w1.rows(), p.w1.cols()), Mat::Zero(p.w1.rows(), p.w1.cols())},
        w2{Mat::Zero(p.w2.rows(), p.w2.cols()), Mat::Zero(p.w2.rows(), p.w2.cols())},
        w3{Mat::Zero(p.w3.rows(), p.w3.cols()), Mat::Zero(p.w3.rows(), p.w3.cols())},
        b1{Vec::Zero(p.b1.size()), Vec::Zero(p.b1.size())},
        b2{Vec::Zero(p.b2.size()), Vec::Zero(p.b2.size())},
        b3{Vec::Zero(p.b3.size()), Vec::Zero(p.b3.size())} {}
};

void adam_encoder(EncoderParams& theta, const Gradients& g, EncoderMoments& mom,
                  long t, double lr, const TrainConfig& cfg) {
  adam_update(theta.w1, g.w1, mom.w1, t, lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  adam_update(theta.w2, g.w2, mom.w2, t, lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  adam_update(theta.w3, g.w3, mom.w3, t, lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  adam_update(theta.b1, g.b1, mom.b1, t, lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  adam_update(theta.b2, g.b2, mom.b2, t, lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  adam_update(theta.b3, g.b3, mom.b3, t, lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
}

Mat gather_columns(const Mat& m, const std::vector<size_t>& order, size_t begin,
                   size_t count) {
  Mat out(m.rows(), static_cast<Eigen::Index>(count));
  for (size_t i = 0; i < count; ++i) {
    out.col(static_cast<Eigen::Index>(i)) =
        m.col(static_cast<Eigen::Index>(order[begin + i]));
  }
  return out;
}

void check_train_config(const TrainConfig& cfg) {
  require(cfg.alpha >= 0.0 && cfg.alpha <= 1.0, ErrorCode::kConfig,
          "train: alpha must lie in [0, 1]");
  require(cfg.batch_size >= 1, ErrorCode::kConfig, "train: batch_size must be >= 1");
  require(cfg.stage1_epochs >= 0 && cfg.stage2_epochs >= 0, ErrorCode::kConfig,
          "train: epoch counts must be >= 0");
  require(cfg.stage1_lr > 0.0 && cfg.stage2_lr > 0.0, ErrorCode::kConfig,
          "train: learning rates must be positive");
  require(cfg.lr_decay_factor > 0.0 && cfg.lr_decay_every_epochs >= 1 &&
              cfg.max_lr_decays >= 0,
          ErrorCode::kConfig, "train: invalid decay schedule");
}

// Epoch-boundary sanity probe: codes and effective dictionaries must stay
// nonnegative with unit-sum columns, and decoded frames convex.
void check_epoch_state(const Mat& probe, const EncoderParams& theta, const Mat* ux_eff,
                       const Mat* uy_eff) {
  const Mat codes = encoder_forward(probe, theta);
  require_unit_columns(codes, kUnitSumTol, "train: codes");
  if (ux_eff != nullptr) require_unit_columns(*ux_eff, kUnitSumTol, "train: source dictionary");
  if (uy_eff != nullptr) {
    require_unit_columns(*uy_eff, kUnitSumTol, "train: target dictionary");
    require_unit_columns(*uy_eff * codes, kUnitSumTol, "train: converted frames");
  }
}

// Splits [0, n) into a training pool and an optional 10% holdout (seeded).
void split_holdout(size_t n, bool enabled, Rng& rng, std::vector<size_t>* pool,
                   std::vector<size_t>* holdout) {
  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;
  if (!enabled) {
    *pool = std::move(perm);
    return;
  }
  rng.shuffle(perm);
  const size_t held = std::max<size_t>(1, n / 10);
  holdout->assign(perm.end() - static_cast<long>(held), perm.end());
  pool->assign(perm.begin(), perm.end() - static_cast<long>(held));
}

}  // namespace

EncoderParams init_encoder(int input_dim, int hidden1, int hidden2, int code_dim,
                           uint64_t seed) {
  require(input_dim >= 1 && hidden1 >= 1 && hidden2 >= 1 && code_dim >= 1,
          ErrorCode::kConfig, "init_encoder: dimensions must be positive");
  Rng rng(seed);
  auto he = [&rng](int rows, int cols) {
    Mat w(rows, cols);
    const double std_dev = std::sqrt(2.0 / static_cast<double>(cols));
    for (int c = 0; c < cols; ++c) {
      for (int r = 0; r < rows; ++r) w(r, c) = std_dev * rng.gaussian();
    }
    return w;
  };
  EncoderParams theta;
  theta.w1 = he(hidden1, input_dim);
  theta.w2 = he(hidden2, hidden1);
  theta.w3 = he(code_dim, hidden2);
  theta.b1 = Vec::Zero(hidden1);
  theta.b2 = Vec::Zero(hidden2);
  theta.b3 = Vec::Zero(code_dim);
  return theta;
}

Mat encoder_forward(const Mat& x, const EncoderParams& theta) {
  check_encoder(theta);
  require(x.rows() == theta.input_dim(), ErrorCode::kDimension,
          "encoder_forward: frame dimension != encoder input");
  return run_forward(x, theta).v;
}

Mat encoder_prenorm_codes(const Mat& x, const EncoderParams& theta) {
  check_encoder(theta);
  require(x.rows() == theta.input_dim(), ErrorCode::kDimension,
          "encoder_prenorm_codes: frame dimension != encoder input");
  return run_forward(x, theta).z;
}

Mat dict_reparam(const Mat& a_pre) {
  Mat u = a_pre.cwiseMax(0.0);
  const double uniform = 1.0 / static_cast<double>(u.rows());
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    const double total = u.col(k).sum();
    if (total < kEpsilonFloor) {
      u.col(k).setConstant(uniform);
    } else {
      u.col(k) /= total;
    }
  }
  return u;
}

Mat decode(const Mat& v, const nmf::Dictionary& u) {
  require(v.rows() == u.bases(), ErrorCode::kDimension,
          "decode: code dimension != dictionary bases");
  return u.matrix() * v;
}

double loss_stage1(const Mat& xbatch, const EncoderParams& theta,
                   const nmf::Dictionary& ux) {
  require(xbatch.cols() > 0, ErrorCode::kInvalidArgument, "loss_stage1: empty batch");
  require_unit_columns(xbatch, kUnitSumPreTol, "loss_stage1: frames");
  check_encoder(theta);
  require(xbatch.rows() == theta.input_dim() && ux.dim() == xbatch.rows() &&
              ux.bases() == theta.code_dim(),
          ErrorCode::kDimension, "loss_stage1: dimension mismatch");
  const Mat v = run_forward(xbatch, theta).v;
  return batch_mean_kld(xbatch, ux.matrix() * v);
}

double loss_stage2(const Mat& xbatch, const Mat& ybatch, const EncoderParams& theta,
                   const DecoderParams& decoders, double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::kInvalidArgument,
          "loss_stage2: alpha must lie in [0, 1]");
  require(xbatch.cols() > 0, ErrorCode::kInvalidArgument, "loss_stage2: empty batch");
  check_stage2_shapes(xbatch, ybatch, theta, decoders);
  const Mat v = run_forward(xbatch, theta).v;
  const double recon = batch_mean_kld(xbatch, dict_reparam(decoders.ax_pre) * v);
  const double conv = batch_mean_kld(ybatch, dict_reparam(decoders.ay_pre) * v);
  return alpha * recon + (1.0 - alpha) * conv;
}

Gradients compute_gradients_stage1(const Mat& xbatch, const EncoderParams& theta,
                                   const nmf::Dictionary& ux) {
  require(xbatch.cols() > 0, ErrorCode::kInvalidArgument, "gradients: empty batch");
  check_encoder(theta);
  require(xbatch.rows() == theta.input_dim() && ux.dim() == xbatch.rows() &&
              ux.bases() == theta.code_dim(),
          ErrorCode::kDimension, "gradients: dimension mismatch");
  return backward(xbatch, nullptr, theta, ux.matrix(), nullptr, nullptr, nullptr, 1.0);
}

Gradients compute_gradients_stage2(const Mat& xbatch, const Mat& ybatch,
                                   const EncoderParams& theta,
                                   const DecoderParams& decoders, double alpha) {
  require(xbatch.cols() > 0, ErrorCode::kInvalidArgument, "gradients: empty batch");
  require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::kInvalidArgument,
          "gradients: alpha must lie in [0, 1]");
  check_stage2_shapes(xbatch, ybatch, theta, decoders);
  const Mat ux_eff = dict_reparam(decoders.ax_pre);
  const Mat uy_eff = dict_reparam(decoders.ay_pre);
  return backward(xbatch, &ybatch, theta, ux_eff, &uy_eff, &decoders.ax_pre,
                  &decoders.ay_pre, alpha);
}

EncoderParams train_stage1(const Mat& frames, EncoderParams theta,
                           const nmf::Dictionary& ux, const TrainConfig& cfg,
                           std::vector<TrainLogRow>* log) {
  check_train_config(cfg);
  check_encoder(theta);
  require(frames.cols() > 0, ErrorCode::kInvalidArgument, "train_stage1: empty corpus");
  require(frames.rows() == theta.input_dim() && ux.dim() == frames.rows() &&
              ux.bases() == theta.code_dim(),
          ErrorCode::kDimension, "train_stage1: dimension mismatch");
  require_unit_columns(frames, kUnitSumPreTol, "train_stage1: frames");
  if (cfg.stage1_epochs == 0) return theta;

  Rng rng(cfg.rng_seed);
  std::vector<size_t> pool, holdout;
  split_holdout(static_cast<size_t>(frames.cols()), cfg.early_stop_patience > 0, rng,
                &pool, &holdout);
  Mat held;
  if (!holdout.empty()) held = gather_columns(frames, holdout, 0, holdout.size());

  EncoderMoments mom(theta);
  long t = 0;
  double best_held = std::numeric_limits<double>::infinity();
  int since_best = 0;
  const size_t batch = static_cast<size_t>(cfg.batch_size);
  const Mat probe = frames.leftCols(std::min<Eigen::Index>(frames.cols(), cfg.batch_size));

  for (int epoch = 1; epoch <= cfg.stage1_epochs; ++epoch) {
    rng.shuffle(pool);
    double loss_sum = 0.0;
    for (size_t pos = 0; pos < pool.size(); pos += batch) {
      const size_t count = std::min(batch, pool.size() - pos);
      const Mat xb = gather_columns(frames, pool, pos, count);
      const Gradients g = backward(xb, nullptr, theta, ux.matrix(), nullptr, nullptr,
                                   nullptr, 1.0);
      ++t;
      adam_encoder(theta, g, mom, t, cfg.stage1_lr, cfg);
      loss_sum += g.loss * static_cast<double>(count);
    }
    const double mean_loss = loss_sum / static_cast<double>(pool.size());
    if (log != nullptr) log->push_back({epoch, 1, cfg.stage1_lr, mean_loss, mean_loss, 0.0});
    check_epoch_state(probe, theta, nullptr, nullptr);

    if (!holdout.empty()) {
      const double held_loss = loss_stage1(held, theta, ux);
      if (held_loss < best_held) {
        best_held = held_loss;
        since_best = 0;
      } else if (++since_best >= cfg.early_stop_patience) {
        break;
      }
    }
  }
  return theta;
}

std::pair<EncoderParams, DecoderParams> train_stage2(const Mat& src_frames,
                                                     const Mat& tgt_frames,
                                                     EncoderParams theta,
                                                     DecoderParams decoders,
                                                     const TrainConfig& cfg,
                                                     std::vector<TrainLogRow>* log) {
  check_train_config(cfg);
  require(src_frames.cols() > 0, ErrorCode::kInvalidArgument, "train_stage2: empty corpus");
  check_stage2_shapes(src_frames, tgt_frames, theta, decoders);
  require_unit_columns(src_frames, kUnitSumPreTol, "train_stage2: source frames");
  require_unit_columns(tgt_frames, kUnitSumPreTol, "train_stage2: target frames");
  if (cfg.stage2_epochs == 0) return {std::move(theta), std::move(decoders)};

  Rng rng(Rng::mix(cfg.rng_seed, 2));
  std::vector<size_t> pool, holdout;
  split_holdout(static_cast<size_t>(src_frames.cols()), cfg.early_stop_patience > 0,
                rng, &pool, &holdout);
  Mat held_x, held_y;
  if (!holdout.empty()) {
    held_x = gather_columns(src_frames, holdout, 0, holdout.size());
    held_y = gather_columns(tgt_frames, holdout, 0, holdout.size());
  }

  EncoderMoments enc_mom(theta);
  AdamMoments<Mat> ax_mom{Mat::Zero(decoders.ax_pre.rows(), decoders.ax_pre.cols()),
                          Mat::Zero(decoders.ax_pre.rows(), decoders.ax_pre.cols())};
  AdamMoments<Mat> ay_mom{Mat::Zero(decoders.ay_pre.rows(), decoders.ay_pre.cols()),
                          Mat::Zero(decoders.ay_pre.rows(), decoders.ay_pre.cols())};
  long t = 0;
  double best_held = std::numeric_limits<double>::infinity();
  int since_best = 0;
  const size_t batch = static_cast<size_t>(cfg.batch_size);
  const Mat probe =
      src_frames.leftCols(std::min<Eigen::Index>(src_frames.cols(), cfg.batch_size));
  const double enc_base = cfg.stage2_encoder_lr > 0.0 ? cfg.stage2_encoder_lr
                                                      : cfg.stage2_lr;

  for (int epoch = 1; epoch <= cfg.stage2_epochs; ++epoch) {
    // Stepwise decay: the base rate holds for lr_decay_every_epochs epochs,
    // then shrinks by lr_decay_factor, at most max_lr_decays times.
    const int decays =
        std::min(cfg.max_lr_decays, (epoch - 1) / cfg.lr_decay_every_epochs);
    const double multiplier = std::pow(cfg.lr_decay_factor, decays);
    const double lr = cfg.stage2_lr * multiplier;
    const double enc_lr = enc_base * multiplier;

    rng.shuffle(pool);
    double loss_sum = 0.0, recon_sum = 0.0, conv_sum = 0.0;
    for (size_t pos = 0; pos < pool.size(); pos += batch) {
      const size_t count = std::min(batch, pool.size() - pos);
      const Mat xb = gather_columns(src_frames, pool, pos, count);
      const Mat yb = gather_columns(tgt_frames, pool, pos, count);
      const Mat ux_eff = dict_reparam(decoders.ax_pre);
      const Mat uy_eff = dict_reparam(decoders.ay_pre);
      const Gradients g = backward(xb, &yb, theta, ux_eff, &uy_eff, &decoders.ax_pre,
                                   &decoders.ay_pre, cfg.alpha);
      ++t;
      adam_encoder(theta, g, enc_mom, t, enc_lr, cfg);
      adam_update(decoders.ax_pre, g.ax_pre, ax_mom, t, lr, cfg.adam_beta1,
                  cfg.adam_beta2, cfg.adam_eps);
      adam_update(decoders.ay_pre, g.ay_pre, ay_mom, t, lr, cfg.adam_beta1,
                  cfg.adam_beta2, cfg.adam_eps);
      loss_sum += g.loss * static_cast<double>(count);
      recon_sum += g.recon_term * static_cast<double>(count);
      conv_sum += g.conv_term * static_cast<double>(count);
    }
    const double n = static_cast<double>(pool.size());
    if (log != nullptr) {
      log->push_back({epoch, 2, lr, loss_sum / n, recon_sum / n, conv_sum / n});
    }
    const Mat ux_eff = dict_reparam(decoders.ax_pre);
    const Mat uy_eff = dict_reparam(decoders.ay_pre);
    check_epoch_state(probe, theta, &ux_eff, &uy_eff);

    if (!holdout.empty()) {
      const double held_loss = loss_stage2(held_x, held_y, theta, decoders, cfg.alpha);
      if (held_loss < best_held) {
        best_held = held_loss;
        since_best = 0;
      } else if (++since_best >= cfg.early_stop_patience) {
        break;
      }
    }
  }
  return {std::move(theta), std::move(decoders)};
}

Mat edn_convert(const Mat& x, const EncoderParams& theta, const nmf::Dictionary& uy) {
  return decode(encoder_forward(x, theta), uy);
}

}  // namespace specon::edn
