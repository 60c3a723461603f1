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

#ifndef SPECON_CORE_FEATURES_HPP_
#define SPECON_CORE_FEATURES_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "core/types.hpp"

namespace specon::features {

// A raw utterance: nonnegative spectral frames (columns) on a linear
// magnitude scale plus its pitch track (Hz, 0 = unvoiced).
struct Utterance {
  Mat frames;
  Vec f0;
  double frame_period_ms = 5.0;
};

// VAD-filtered, unit-sum-normalized view of an utterance. Reconstructing
// raw frame n as energies[n] * frames.col(n) is exact up to rounding.
struct NormalizedUtterance {
  Mat frames;                      // unit-sum columns
  Vec energies;                    // per-frame column sums of the raw matrix
  Vec f0;                          // pitch of the retained frames
  std::vector<uint8_t> voiced;     // f0 > 0, per retained frame
  std::vector<int> kept;           // original column index of each retained frame
};

// Per-source-frame index into the target utterance. Monotone nondecreasing;
// the source length is preserved.
struct AlignmentMap {
  std::vector<int> target_index;
};

// Mean and standard deviation of the voiced pitch values. Log-Hz by default.
struct F0Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

// Removes frames whose energy (in dB of the column sum) falls more than
// vad_floor_db below the loudest frame, then rescales the survivors to unit
// sum. Frames with zero energy are always removed.
NormalizedUtterance normalize_utterance(const Utterance& u, double vad_floor_db);

// Inverse of the normalization: column n of the result is energies[n] * f[:,n].
Mat energy_compensate(const Mat& frames, const Vec& energies);

// Mel-cepstral coefficients: unit-area triangular mel filters (0..Nyquist),
// floored natural log, orthonormal DCT-II, first order+1 rows (row 0 = c0).
// Spectral bin k of an M-row frame is taken at frequency k * nyquist / (M-1).
Mat mcc_extract(const Mat& frames, int order, int n_mel, double sample_rate_hz);

// Dynamic time warping with squared-Euclidean local cost on MCC columns
// (c0 excluded), steps {(1,0),(0,1),(1,1)}, endpoints pinned. Ties during
// path recovery prefer the diagonal step, then the source-advancing step.
AlignmentMap dtw_align(const Mat& src_mcc, const Mat& tgt_mcc);

// Accumulated DTW path cost of an alignment grid; exposed for verification.
double dtw_cost(const Mat& src_mcc, const Mat& tgt_mcc);

// Population mean/std of the pitch over voiced frames (f0 > 0). Requires at
// least two voiced frames and nonzero variance. log_domain selects log-Hz.
F0Stats f0_stats(const Vec& f0, bool log_domain = true);

// Mean-variance pitch transform on voiced frames; unvoiced (0) passes through.
Vec f0_convert(const Vec& f0, const F0Stats& src, const F0Stats& tgt,
               bool log_domain = true);

struct SynthConfig {
  int dim = 64;                   // spectral dimensionality M
  int bases = 32;                 // ground-truth dictionary size
  int train_utterances = 20;
  int eval_utterances = 5;
  int frames_per_utterance = 100; // active (non-silence) frames per utterance
  int silence_frames = 3;         // leading and trailing silence padding
  double sparsity = 0.1;          // fraction of active code entries per frame
  double noise = 0.0;             // nonnegative additive noise level
  double basis_spread = 2.0;      // log-normal spread of dictionary entries
  int code_segment_frames = 6;    // shortest run of frames sharing a support
  double code_jitter = 0.15;      // within-segment log-normal weight drift
  // Log-normal spread between the paired speaker dictionaries. The two
  // speakers must stay spectrally related for cross-speaker alignment to be
  // meaningful; 0 makes them identical.
  double speaker_spread = 0.6;
  double src_f0_hz = 120.0;
  double tgt_f0_hz = 220.0;
  double src_f0_log_std = 0.12;
  double tgt_f0_log_std = 0.18;
  double frame_period_ms = 5.0;
  double sample_rate_hz = 16000.0;
};

// A parallel corpus with known factorization: paired ground-truth
// dictionaries and, per utterance, the shared sparse codes of its active
// frames. Utterances [0, n_train) are the training split.
struct SynthCorpus {
  std::vector<Utterance> src;
  std::vector<Utterance> tgt;
  std::vector<Mat> truth_codes;   // bases x active-frames, per utterance
  Mat truth_ux;
  Mat truth_uy;
  int n_train = 0;
};

// Draws a deterministic synthetic parallel corpus: source frames are
// energies * (Ux* V*) (plus optional noise), target frames use Uy* with the
// same codes, and pitch tracks are piecewise constant with unvoiced gaps.
SynthCorpus synth_corpus(const SynthConfig& cfg, uint64_t seed);

}  // namespace specon::features

#endif  // SPECON_CORE_FEATURES_HPP_
