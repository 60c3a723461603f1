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

#include "core/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/rng.hpp"

namespace specon::features {

namespace {

constexpr double kLogFloor = 1e-10;  // floor before the filterbank log

double hz_to_mel(double hz) { return 1127.0 * std::log1p(hz / 700.0); }

// Unit-area triangular filters, evaluated on the mel axis at the bin centers.
// A filter whose support catches no bin stays all-zero and yields the log
// floor downstream.
Mat mel_filterbank(int n_mel, int n_bins, double sample_rate_hz) {
  const double nyquist = sample_rate_hz / 2.0;
  const double mel_max = hz_to_mel(nyquist);
  const double step = mel_max / (n_mel + 1);
  Vec bin_mel(n_bins);
  for (int k = 0; k < n_bins; ++k) {
    bin_mel[k] = hz_to_mel(nyquist * k / (n_bins - 1));
  }
  Mat fb = Mat::Zero(n_mel, n_bins);
  for (int j = 0; j < n_mel; ++j) {
    const double center = step * (j + 1);
    double total = 0.0;
    for (int k = 0; k < n_bins; ++k) {
      const double w = 1.0 - std::abs(bin_mel[k] - center) / step;
      if (w > 0.0) {
        fb(j, k) = w;
        total += w;
      }
    }
    if (total > 0.0) fb.row(j) /= total;
  }
  return fb;
}

// Orthonormal DCT-II, rows 0..order over n_mel channels.
Mat dct_matrix(int order, int n_mel) {
  Mat d(order + 1, n_mel);
  const double norm0 = std::sqrt(1.0 / n_mel);
  const double norm = std::sqrt(2.0 / n_mel);
  for (int r = 0; r <= order; ++r) {
    for (int j = 0; j < n_mel; ++j) {
      const double angle = std::numbers::pi * r * (j + 0.5) / n_mel;
      d(r, j) = (r == 0 ? norm0 : norm) * std::cos(angle);
    }
  }
  return d;
}

// Squared Euclidean distances between all column pairs, rows 1.. only.
Mat local_cost(const Mat& a, const Mat& b) {
  const auto ab = a.bottomRows(a.rows() - 1);
  const auto bb = b.bottomRows(b.rows() - 1);
  Vec na = ab.colwise().squaredNorm();
  Vec nb = bb.colwise().squaredNorm();
  Mat d = -2.0 * (ab.transpose() * bb);
  d.colwise() += na;
  d.rowwise() += nb.transpose();
  return d.cwiseMax(0.0);
}

Mat dtw_table(const Mat& d) {
  const Eigen::Index n = d.rows(), t = d.cols();
  Mat acc(n, t);
  acc(0, 0) = d(0, 0);
  for (Eigen::Index j = 1; j < t; ++j) acc(0, j) = acc(0, j - 1) + d(0, j);
  for (Eigen::Index i = 1; i < n; ++i) {
    acc(i, 0) = acc(i - 1, 0) + d(i, 0);
    for (Eigen::Index j = 1; j < t; ++j) {
      const double best =
          std::min(acc(i - 1, j - 1), std::min(acc(i - 1, j), acc(i, j - 1)));
      acc(i, j) = best + d(i, j);
    }
  }
  return acc;
}

void check_dtw_inputs(const Mat& src_mcc, const Mat& tgt_mcc) {
  require(src_mcc.cols() > 0 && tgt_mcc.cols() > 0, ErrorCode::kInvalidArgument,
          "dtw_align: empty input");
  require(src_mcc.rows() == tgt_mcc.rows(), ErrorCode::kDimension,
          "dtw_align: row count mismatch");
  require(src_mcc.rows() >= 2, ErrorCode::kInvalidArgument,
          "dtw_align: need at least c0 and c1");
}

}  // namespace

NormalizedUtterance normalize_utterance(const Utterance& u, double vad_floor_db) {
  require(u.frames.size() > 0, ErrorCode::kInvalidArgument,
          "normalize_utterance: empty utterance");
  require(is_nonnegative(u.frames), ErrorCode::kDomain,
          "normalize_utterance: negative spectral entry");
  require(u.f0.size() == u.frames.cols(), ErrorCode::kDimension,
          "normalize_utterance: f0 length != frame count");
  require(u.frame_period_ms > 0.0, ErrorCode::kInvalidArgument,
          "normalize_utterance: frame period must be positive");

  const Vec sums = u.frames.colwise().sum();
  double max_db = -std::numeric_limits<double>::infinity();
  for (Eigen::Index n = 0; n < sums.size(); ++n) {
    if (sums[n] > 0.0) max_db = std::max(max_db, 10.0 * std::log10(sums[n]));
  }
  require(std::isfinite(max_db), ErrorCode::kDomain,
          "normalize_utterance: all frames silent");

  std::vector<int> kept;
  for (Eigen::Index n = 0; n < sums.size(); ++n) {
    if (sums[n] <= 0.0) continue;
    if (10.0 * std::log10(sums[n]) >= max_db - vad_floor_db) {
      kept.push_back(static_cast<int>(n));
    }
  }
  require(!kept.empty(), ErrorCode::kDomain, "normalize_utterance: all frames silent");

  NormalizedUtterance out;
  const Eigen::Index m = u.frames.rows();
  out.frames.resize(m, static_cast<Eigen::Index>(kept.size()));
  out.energies.resize(static_cast<Eigen::Index>(kept.size()));
  out.f0.resize(static_cast<Eigen::Index>(kept.size()));
  out.voiced.resize(kept.size());
  for (size_t i = 0; i < kept.size(); ++i) {
    const Eigen::Index n = kept[i];
    out.energies[static_cast<Eigen::Index>(i)] = sums[n];
    out.frames.col(static_cast<Eigen::Index>(i)) = u.frames.col(n) / sums[n];
    out.f0[static_cast<Eigen::Index>(i)] = u.f0[n];
    out.voiced[i] = u.f0[n] > 0.0 ? 1 : 0;
  }
  out.kept = std::move(kept);
  return out;
}

Mat energy_compensate(const Mat& frames, const Vec& energies) {
  require(frames.cols() == energies.size(), ErrorCode::kDimension,
          "energy_compensate: column count != energies length");
  Mat out = frames;
  for (Eigen::Index n = 0; n < out.cols(); ++n) out.col(n) *= energies[n];
  return out;
}

Mat mcc_extract(const Mat& frames, int order, int n_mel, double sample_rate_hz) {
  require(order >= 1, ErrorCode::kConfig, "mcc_extract: order must be >= 1");
  require(n_mel > order, ErrorCode::kConfig, "mcc_extract: need n_mel > order");
  require(frames.rows() >= 2, ErrorCode::kInvalidArgument,
          "mcc_extract: need at least two spectral bins");
  require(sample_rate_hz > 0.0, ErrorCode::kConfig,
          "mcc_extract: sample rate must be positive");
  require(is_nonnegative(frames), ErrorCode::kDomain,
          "mcc_extract: negative spectral entry");

  const Mat fb = mel_filterbank(n_mel, static_cast<int>(frames.rows()), sample_rate_hz);
  Mat energies = fb * frames;
  Mat logs = energies.array().max(kLogFloor).log().matrix();
  return dct_matrix(order, n_mel) * logs;
}

double dtw_cost(const Mat& src_mcc, const Mat& tgt_mcc) {
  check_dtw_inputs(src_mcc, tgt_mcc);
  const Mat acc = dtw_table(local_cost(src_mcc, tgt_mcc));
  return acc(acc.rows() - 1, acc.cols() - 1);
}

AlignmentMap dtw_align(const Mat& src_mcc, const Mat& tgt_mcc) {
  check_dtw_inputs(src_mcc, tgt_mcc);
  const Mat d = local_cost(src_mcc, tgt_mcc);
  const Mat acc = dtw_table(d);
  const Eigen::Index n = d.rows(), t = d.cols();

  // Walk back from the pinned endpoint. The first time an index i is seen is
  // its largest target index on the path; that becomes the map entry.
  AlignmentMap map;
  map.target_index.assign(static_cast<size_t>(n), -1);
  Eigen::Index i = n - 1, j = t - 1;
  while (true) {
    if (map.target_index[static_cast<size_t>(i)] < 0) {
      map.target_index[static_cast<size_t>(i)] = static_cast<int>(j);
    }
    if (i == 0 && j == 0) break;
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = acc(i - 1, j - 1);
      const double up = acc(i - 1, j);
      const double left = acc(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
  }
  return map;
}

F0Stats f0_stats(const Vec& f0, bool log_domain) {
  std::vector<double> voiced;
  for (Eigen::Index n = 0; n < f0.size(); ++n) {
    require(f0[n] >= 0.0, ErrorCode::kDomain, "f0_stats: negative pitch");
    if (f0[n] > 0.0) voiced.push_back(log_domain ? std::log(f0[n]) : f0[n]);
  }
  require(voiced.size() >= 2, ErrorCode::kDomain,
          "f0_stats: need at least two voiced frames");
  double mean = 0.0;
  for (double v : voiced) mean += v;
  mean /= static_cast<double>(voiced.size());
  double var = 0.0;
  for (double v : voiced) var += (v - mean) * (v - mean);
  var /= static_cast<double>(voiced.size());
  const double stddev = std::sqrt(var);
  require(stddev > 0.0, ErrorCode::kDomain, "f0_stats: zero pitch variance");
  return {mean, stddev};
}

Vec f0_convert(const Vec& f0, const F0Stats& src, const F0Stats& tgt, bool log_domain) {
  require(src.stddev > 0.0 && tgt.stddev > 0.0, ErrorCode::kInvalidArgument,
          "f0_convert: invalid statistics");
  Vec out(f0.size());
  for (Eigen::Index n = 0; n < f0.size(); ++n) {
    if (f0[n] <= 0.0) {
      out[n] = 0.0;
      continue;
    }
    const double v = log_domain ? std::log(f0[n]) : f0[n];
    const double w = (v - src.mean) * (tgt.stddev / src.stddev) + tgt.mean;
    out[n] = log_domain ? std::exp(w) : w;
  }
  return out;
}

SynthCorpus synth_corpus(const SynthConfig& cfg, uint64_t seed) {
  require(cfg.dim >= 2 && cfg.bases >= 1, ErrorCode::kConfig,
          "synth_corpus: dimensions must be positive");
  require(cfg.train_utterances >= 1 && cfg.eval_utterances >= 0,
          ErrorCode::kConfig, "synth_corpus: utterance counts invalid");
  require(cfg.frames_per_utterance >= 1 && cfg.silence_frames >= 0,
          ErrorCode::kConfig, "synth_corpus: frame counts invalid");
  require(cfg.sparsity > 0.0 && cfg.sparsity <= 1.0, ErrorCode::kConfig,
          "synth_corpus: sparsity must be in (0, 1]");
  require(cfg.noise >= 0.0, ErrorCode::kConfig, "synth_corpus: noise must be >= 0");
  require(cfg.code_segment_frames >= 1 && cfg.code_jitter >= 0.0, ErrorCode::kConfig,
          "synth_corpus: invalid code segment shape");
  require(cfg.src_f0_hz > 0.0 && cfg.tgt_f0_hz > 0.0, ErrorCode::kConfig,
          "synth_corpus: pitch means must be positive");

  require(cfg.speaker_spread >= 0.0, ErrorCode::kConfig,
          "synth_corpus: speaker_spread must be >= 0");

  Rng rng(seed);
  const int m = cfg.dim;
  const int k = cfg.bases;

  SynthCorpus corpus;
  corpus.n_train = cfg.train_utterances;

  // Source dictionary: log-normal entries are strictly positive and spiky
  // enough to keep the bases well separated. The target dictionary is a
  // per-entry reweighting of the source, so the two speakers differ while
  // sharing spectral structure.
  corpus.truth_ux.resize(m, k);
  for (int c = 0; c < k; ++c) {
    for (int r = 0; r < m; ++r) {
      corpus.truth_ux(r, c) = std::exp(cfg.basis_spread * rng.gaussian());
    }
    corpus.truth_ux.col(c) /= corpus.truth_ux.col(c).sum();
  }
  corpus.truth_uy.resize(m, k);
  for (int c = 0; c < k; ++c) {
    for (int r = 0; r < m; ++r) {
      corpus.truth_uy(r, c) =
          corpus.truth_ux(r, c) * std::exp(cfg.speaker_spread * rng.gaussian());
    }
    corpus.truth_uy.col(c) /= corpus.truth_uy.col(c).sum();
  }

  const int active = cfg.frames_per_utterance;
  const int pad = cfg.silence_frames;
  const int total = active + 2 * pad;
  const int support = std::max(1, static_cast<int>(std::lround(cfg.sparsity * k)));
  const int n_utts = cfg.train_utterances + cfg.eval_utterances;

  for (int utt = 0; utt < n_utts; ++utt) {
    // Shared sparse codes, drawn segment-wise: a segment keeps its support
    // and drifts its weights slightly, so consecutive frames stay similar
    // (which is what gives time warping something to align).
    Mat codes = Mat::Zero(k, active);
    {
      int n = 0;
      while (n < active) {
        const int len = std::min(
            active - n, cfg.code_segment_frames + static_cast<int>(rng.below(10)));
        const auto idx = rng.sample(static_cast<size_t>(k), static_cast<size_t>(support));
        std::vector<double> base(idx.size());
        for (size_t s = 0; s < idx.size(); ++s) base[s] = std::exp(rng.gaussian());
        for (int f = n; f < n + len; ++f) {
          double sum = 0.0;
          for (size_t s = 0; s < idx.size(); ++s) {
            const double w = base[s] * std::exp(cfg.code_jitter * rng.gaussian());
            codes(static_cast<Eigen::Index>(idx[s]), f) = w;
            sum += w;
          }
          codes.col(f) /= sum;
        }
        n += len;
      }
    }

    Mat src_unit = corpus.truth_ux * codes;
    Mat tgt_unit = corpus.truth_uy * codes;
    if (cfg.noise > 0.0) {
      for (Eigen::Index c = 0; c < src_unit.cols(); ++c) {
        for (Eigen::Index r = 0; r < src_unit.rows(); ++r) {
          src_unit(r, c) += cfg.noise * rng.uniform() / m;
        }
        src_unit.col(c) /= src_unit.col(c).sum();
      }
    }

    // Shared voicing segmentation; independent per-speaker pitch values.
    std::vector<uint8_t> voiced(static_cast<size_t>(active));
    {
      int n = 0;
      bool v = true;
      while (n < active) {
        const int len = 8 + static_cast<int>(rng.below(12));
        for (int s = 0; s < len && n < active; ++s, ++n) {
          voiced[static_cast<size_t>(n)] = v ? 1 : 0;
        }
        v = !v;
      }
    }
    auto draw_f0 = [&](double mean_hz, double log_std) {
      Vec f0 = Vec::Zero(total);
      int n = 0;
      while (n < active) {
        // Segment boundaries mirror the voicing pattern above.
        const bool v = voiced[static_cast<size_t>(n)] != 0;
        int end = n;
        while (end < active && (voiced[static_cast<size_t>(end)] != 0) == v) ++end;
        if (v) {
          const double hz = std::exp(std::log(mean_hz) + log_std * rng.gaussian());
          for (int s = n; s < end; ++s) f0[pad + s] = hz;
        }
        n = end;
      }
      return f0;
    };
    Vec src_f0 = draw_f0(cfg.src_f0_hz, cfg.src_f0_log_std);
    Vec tgt_f0 = draw_f0(cfg.tgt_f0_hz, cfg.tgt_f0_log_std);

    // Raw frames: silence pads 80 dB below the active energies.
    Vec energies(active);
    for (int n = 0; n < active; ++n) energies[n] = std::exp(0.25 * rng.gaussian());
    auto assemble = [&](const Mat& unit) {
      Mat raw(m, total);
      const double silence_energy = 1e-8;
      const Vec silent = Vec::Constant(m, silence_energy / m);
      for (int p = 0; p < pad; ++p) {
        raw.col(p) = silent;
        raw.col(total - 1 - p) = silent;
      }
      for (int n = 0; n < active; ++n) raw.col(pad + n) = energies[n] * unit.col(n);
      return raw;
    };

    corpus.src.push_back({assemble(src_unit), std::move(src_f0), cfg.frame_period_ms});
    corpus.tgt.push_back({assemble(tgt_unit), std::move(tgt_f0), cfg.frame_period_ms});
    corpus.truth_codes.push_back(std::move(codes));
  }
  return corpus;
}

}  // namespace specon::features
