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

#ifndef SPECON_CORE_EDN_HPP_
#define SPECON_CORE_EDN_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "core/nmf.hpp"
#include "core/types.hpp"

namespace specon::edn {

// Feed-forward encoder M -> H1 -> H2 -> K with ReLU at every layer; the last
// layer's rectified output is normalized to a unit-sum code.
struct EncoderParams {
  Mat w1, w2, w3;
  Vec b1, b2, b3;

  Eigen::Index input_dim() const { return w1.cols(); }
  Eigen::Index code_dim() const { return w3.rows(); }
};

// Pre-activation decoder dictionaries. The effective dictionaries are
// dict_reparam(ax_pre) and dict_reparam(ay_pre) and satisfy the Dictionary
// invariants at all times.
struct DecoderParams {
  Mat ax_pre;
  Mat ay_pre;
};

struct TrainConfig {
  double alpha = 0.15;            // weight of self-reconstruction in stage 2
  int batch_size = 512;
  double stage1_lr = 0.001;
  double stage2_lr = 0.01;
  // 0 keeps the encoder on stage2_lr in stage 2; nonzero overrides it.
  double stage2_encoder_lr = 0.0;
  int stage1_epochs = 100;
  int stage2_epochs = 150;
  double lr_decay_factor = 0.1;
  int lr_decay_every_epochs = 50;
  int max_lr_decays = 3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t rng_seed = 0;
  // > 0 holds out 10% of the frames and stops after this many epochs
  // without held-out improvement. Off by default.
  int early_stop_patience = 0;
};

// He-scaled Gaussian weights, zero biases, deterministic in the seed.
EncoderParams init_encoder(int input_dim, int hidden1, int hidden2, int code_dim,
                           uint64_t seed);

// Unit-sum nonnegative codes, one column per frame. Columns whose rectified
// output sums below the floor fall back to the uniform code.
Mat encoder_forward(const Mat& x, const EncoderParams& theta);

// Rectified output of the last layer before normalization (the entries whose
// exact zeros make the code sparse).
Mat encoder_prenorm_codes(const Mat& x, const EncoderParams& theta);

// Per column: relu then unit-sum normalization; all-nonpositive columns fall
// back to the uniform column.
Mat dict_reparam(const Mat& a_pre);

// Linear decoding U * V.
Mat decode(const Mat& v, const nmf::Dictionary& u);

double loss_stage1(const Mat& xbatch, const EncoderParams& theta,
                   const nmf::Dictionary& ux);
double loss_stage2(const Mat& xbatch, const Mat& ybatch, const EncoderParams& theta,
                   const DecoderParams& decoders, double alpha);

struct Gradients {
  Mat w1, w2, w3;
  Vec b1, b2, b3;
  Mat ax_pre, ay_pre;             // empty in stage 1
  bool has_decoder_grads = false;
  double loss = 0.0;
  double recon_term = 0.0;        // mean reconstruction divergence
  double conv_term = 0.0;         // mean conversion divergence (stage 2)
};

// Exact gradients of the stage-1 batch loss with respect to the encoder.
Gradients compute_gradients_stage1(const Mat& xbatch, const EncoderParams& theta,
                                   const nmf::Dictionary& ux);

// Exact gradients of the stage-2 batch loss with respect to the encoder and
// both pre-activation dictionaries.
Gradients compute_gradients_stage2(const Mat& xbatch, const Mat& ybatch,
                                   const EncoderParams& theta,
                                   const DecoderParams& decoders, double alpha);

// Adam moments for one tensor group; shapes mirror the parameters.
template <typename T>
struct AdamMoments {
  T m;
  T v;
};

// Standard Adam update with bias correction, in place. t counts steps
// starting at 1.
template <typename T>
void adam_update(T& param, const T& grad, AdamMoments<T>& state, long t, double lr,
                 double beta1, double beta2, double eps) {
  require(param.rows() == grad.rows() && param.cols() == grad.cols(),
          ErrorCode::kDimension, "adam: parameter/gradient shape mismatch");
  state.m = beta1 * state.m + (1.0 - beta1) * grad;
  state.v = (beta2 * state.v.array() + (1.0 - beta2) * grad.array().square()).matrix();
  const double mhat = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double vhat = 1.0 - std::pow(beta2, static_cast<double>(t));
  param.array() -=
      lr * (state.m.array() / mhat) / ((state.v.array() / vhat).sqrt() + eps);
}

struct TrainLogRow {
  int epoch = 0;                  // 1-based within its stage
  int stage = 0;
  double lr = 0.0;
  double loss = 0.0;
  double recon_kld = 0.0;
  double conv_kld = 0.0;
};

// Stage 1: encoder-only training against a fixed dictionary, seeded shuffled
// mini-batches, Adam. The per-epoch mean loss is appended to *log.
EncoderParams train_stage1(const Mat& frames, EncoderParams theta,
                           const nmf::Dictionary& ux, const TrainConfig& cfg,
                           std::vector<TrainLogRow>* log);

// Stage 2: joint training of the encoder and both dictionaries on aligned
// frame pairs, with the stepwise learning-rate decay schedule.
std::pair<EncoderParams, DecoderParams> train_stage2(const Mat& src_frames,
                                                     const Mat& tgt_frames,
                                                     EncoderParams theta,
                                                     DecoderParams decoders,
                                                     const TrainConfig& cfg,
                                                     std::vector<TrainLogRow>* log);

// Conversion: encode source frames, decode with the target dictionary.
Mat edn_convert(const Mat& x, const EncoderParams& theta, const nmf::Dictionary& uy);

}  // namespace specon::edn

#endif  // SPECON_CORE_EDN_HPP_
