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

#include "core/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "core/checkpoint.hpp"
#include "core/edn.hpp"
#include "core/eval.hpp"
#include "core/features.hpp"
#include "core/fmat.hpp"
#include "core/format.hpp"
#include "core/manifest.hpp"
#include "core/nmf.hpp"
#include "core/rng.hpp"

namespace specon::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utt_name(const char* prefix, int i, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03d.%s", prefix, i, suffix);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  require(out.is_open(), ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  require(out.good(), ErrorCode::kIo, "write failed: " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  require(in.is_open(), ErrorCode::kIo, "cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorCode::kIo, "bad json in " + path.string() + ": " + e.what());
  }
  return doc;
}

Vec read_f0(const fs::path& path) {
  const Mat m = io::read_fmat_file(path);
  require(m.rows() == 1, ErrorCode::kIo, "pitch track must have one row: " + path.string());
  return m.row(0).transpose();
}

Mat row_matrix(const Vec& v) { return v.transpose(); }

features::SynthConfig synth_config(const Config& cfg) {
  features::SynthConfig sc;
  sc.dim = cfg.synth_dim;
  sc.bases = cfg.synth_bases;
  sc.train_utterances = cfg.synth_train_utterances;
  sc.eval_utterances = cfg.synth_eval_utterances;
  sc.frames_per_utterance = cfg.synth_frames_per_utterance;
  sc.silence_frames = cfg.synth_silence_frames;
  sc.sparsity = cfg.synth_sparsity;
  sc.noise = cfg.synth_noise;
  sc.basis_spread = cfg.synth_basis_spread;
  sc.src_f0_hz = cfg.synth_src_f0_hz;
  sc.tgt_f0_hz = cfg.synth_tgt_f0_hz;
  sc.src_f0_log_std = cfg.synth_src_f0_log_std;
  sc.tgt_f0_log_std = cfg.synth_tgt_f0_log_std;
  sc.frame_period_ms = cfg.frame_period_ms;
  sc.sample_rate_hz = cfg.sample_rate_hz;
  return sc;
}

nmf::SolveOptions solve_options(const Config& cfg) {
  nmf::SolveOptions opts;
  opts.max_iters = cfg.solver_max_iters;
  opts.sparsity_lambda = cfg.sparsity_lambda;
  opts.tol = cfg.solver_tol;
  opts.epsilon_floor = cfg.epsilon_floor;
  return opts;
}

edn::TrainConfig train_config(const Config& cfg) {
  edn::TrainConfig tc;
  tc.alpha = cfg.alpha;
  tc.batch_size = cfg.batch_size;
  tc.stage1_lr = cfg.stage1_lr;
  tc.stage2_lr = cfg.stage2_lr;
  tc.stage2_encoder_lr = cfg.stage2_encoder_lr;
  tc.stage1_epochs = cfg.stage1_epochs;
  tc.stage2_epochs = cfg.stage2_epochs;
  tc.lr_decay_factor = cfg.lr_decay_factor;
  tc.lr_decay_every_epochs = cfg.lr_decay_every_epochs;
  tc.max_lr_decays = cfg.max_lr_decays;
  tc.adam_beta1 = cfg.adam_beta1;
  tc.adam_beta2 = cfg.adam_beta2;
  tc.adam_eps = cfg.adam_eps;
  tc.rng_seed = Rng::mix(cfg.seed, 202);
  tc.early_stop_patience = cfg.early_stop_patience;
  return tc;
}

struct PreparedPair {
  Mat src;          // unit-sum source frames
  Mat tgt;          // aligned unit-sum target frames
  Vec src_energy;
  Vec src_f0;
  std::string split;
};

struct PreparedCorpus {
  std::vector<PreparedPair> pairs;
  features::F0Stats src_stats;
  features::F0Stats tgt_stats;
  bool log_domain = true;
};

PreparedCorpus load_prepared(const Config& cfg) {
  const fs::path dir = cfg.prepared_dir;
  const json doc = read_json(dir / "prepared.json");
  PreparedCorpus out;
  for (const auto& p : doc.at("pairs")) {
    PreparedPair pair;
    pair.split = p.at("split").get<std::string>();
    pair.src = io::read_fmat_file(dir / p.at("src").get<std::string>());
    pair.tgt = io::read_fmat_file(dir / p.at("tgt").get<std::string>());
    pair.src_energy = read_f0(dir / p.at("src_energy").get<std::string>());
    pair.src_f0 = read_f0(dir / p.at("src_f0").get<std::string>());
    out.pairs.push_back(std::move(pair));
  }
  const json stats = read_json(dir / "f0_stats.json");
  out.src_stats = {stats.at("src").at("mean").get<double>(),
                   stats.at("src").at("stddev").get<double>()};
  out.tgt_stats = {stats.at("tgt").at("mean").get<double>(),
                   stats.at("tgt").at("stddev").get<double>()};
  out.log_domain = stats.at("log_domain").get<bool>();
  return out;
}

// Concatenates the training-split pairs column-wise.
std::pair<Mat, Mat> concat_training(const PreparedCorpus& prepared) {
  Eigen::Index total = 0, rows = 0, trows = 0;
  for (const auto& p : prepared.pairs) {
    if (p.split != "train") continue;
    total += p.src.cols();
    rows = p.src.rows();
    trows = p.tgt.rows();
  }
  require(total > 0, ErrorCode::kInvalidArgument, "train: no training pairs prepared");
  Mat x(rows, total), y(trows, total);
  Eigen::Index at = 0;
  for (const auto& p : prepared.pairs) {
    if (p.split != "train") continue;
    x.middleCols(at, p.src.cols()) = p.src;
    y.middleCols(at, p.tgt.cols()) = p.tgt;
    at += p.src.cols();
  }
  return {std::move(x), std::move(y)};
}

struct CorpusFiles {
  json doc;
  fs::path dir;
};

CorpusFiles load_corpus_index(const Config& cfg) {
  const fs::path dir = cfg.corpus_dir;
  return {read_json(dir / "corpus.json"), dir};
}

std::string losslog_csv(const std::vector<edn::TrainLogRow>& rows) {
  std::string out = "epoch,stage,lr,loss,recon_kld,conv_kld\n";
  for (const auto& r : rows) {
    out += std::to_string(r.epoch) + "," + std::to_string(r.stage) + "," + format_double(r.lr) +
           "," + format_double(r.loss) + "," + format_double(r.recon_kld) + "," + format_double(r.conv_kld) + "\n";
  }
  return out;
}

}  // namespace

void run_synth(const Config& cfg) {
  cfg.validate();
  const fs::path dir = cfg.corpus_dir;
  fs::create_directories(dir);

  const features::SynthCorpus corpus = features::synth_corpus(synth_config(cfg), cfg.seed);
  std::vector<std::string> files;
  json utts = json::array();
  for (size_t i = 0; i < corpus.src.size(); ++i) {
    const int id = static_cast<int>(i);
    const std::string src = utt_name("utt", id, "src.fmat");
    const std::string tgt = utt_name("utt", id, "tgt.fmat");
    const std::string src_f0 = utt_name("utt", id, "src_f0.fmat");
    const std::string tgt_f0 = utt_name("utt", id, "tgt_f0.fmat");
    const std::string codes = utt_name("utt", id, "codes.fmat");
    io::write_fmat_file(dir / src, corpus.src[i].frames);
    io::write_fmat_file(dir / tgt, corpus.tgt[i].frames);
    io::write_fmat_file(dir / src_f0, row_matrix(corpus.src[i].f0));
    io::write_fmat_file(dir / tgt_f0, row_matrix(corpus.tgt[i].f0));
    io::write_fmat_file(dir / codes, corpus.truth_codes[i]);
    utts.push_back({{"id", id},
                    {"split", id < corpus.n_train ? "train" : "eval"},
                    {"src", src},
                    {"tgt", tgt},
                    {"src_f0", src_f0},
                    {"tgt_f0", tgt_f0},
                    {"truth_codes", codes}});
    for (const auto& f : {src, tgt, src_f0, tgt_f0, codes}) files.push_back(f);
  }
  io::write_fmat_file(dir / "truth_ux.fmat", corpus.truth_ux);
  io::write_fmat_file(dir / "truth_uy.fmat", corpus.truth_uy);
  files.push_back("truth_ux.fmat");
  files.push_back("truth_uy.fmat");

  json doc;
  doc["dim"] = cfg.synth_dim;
  doc["bases"] = cfg.synth_bases;
  doc["frame_period_ms"] = cfg.frame_period_ms;
  doc["sample_rate_hz"] = cfg.sample_rate_hz;
  doc["seed"] = cfg.seed;
  doc["truth_ux"] = "truth_ux.fmat";
  doc["truth_uy"] = "truth_uy.fmat";
  doc["utterances"] = utts;
  write_text(dir / "corpus.json", doc.dump(2) + "\n");
  files.push_back("corpus.json");
  io::write_manifest(dir, files);
}

void run_prepare(const Config& cfg) {
  cfg.validate();
  const CorpusFiles corpus = load_corpus_index(cfg);
  const fs::path dir = cfg.prepared_dir;
  fs::create_directories(dir);

  std::vector<std::string> files;
  json pairs = json::array();
  std::vector<double> src_f0_all, tgt_f0_all;

  for (const auto& utt : corpus.doc.at("utterances")) {
    const int id = utt.at("id").get<int>();
    const std::string split = utt.at("split").get<std::string>();

    features::Utterance src;
    src.frames = io::read_fmat_file(corpus.dir / utt.at("src").get<std::string>());
    src.f0 = read_f0(corpus.dir / utt.at("src_f0").get<std::string>());
    src.frame_period_ms = corpus.doc.at("frame_period_ms").get<double>();
    features::Utterance tgt;
    tgt.frames = io::read_fmat_file(corpus.dir / utt.at("tgt").get<std::string>());
    tgt.f0 = read_f0(corpus.dir / utt.at("tgt_f0").get<std::string>());
    tgt.frame_period_ms = src.frame_period_ms;
    require(src.frames.rows() == tgt.frames.rows(), ErrorCode::kDimension,
            "prepare: source/target dimensionality differs");

    const auto src_norm = features::normalize_utterance(src, cfg.vad_floor_db);
    const auto tgt_norm = features::normalize_utterance(tgt, cfg.vad_floor_db);
    const double rate = corpus.doc.at("sample_rate_hz").get<double>();
    const Mat src_mcc =
        features::mcc_extract(src_norm.frames, cfg.mcc_order, cfg.mel_filters, rate);
    const Mat tgt_mcc =
        features::mcc_extract(tgt_norm.frames, cfg.mcc_order, cfg.mel_filters, rate);
    const auto align = features::dtw_align(src_mcc, tgt_mcc);

    Mat aligned_tgt(tgt_norm.frames.rows(), src_norm.frames.cols());
    Vec align_idx(src_norm.frames.cols());
    for (Eigen::Index n = 0; n < src_norm.frames.cols(); ++n) {
      const int j = align.target_index[static_cast<size_t>(n)];
      aligned_tgt.col(n) = tgt_norm.frames.col(j);
      align_idx[n] = j;
    }

    const std::string base = utt_name("pair", id, "");
    const std::string f_src = base + "src.fmat";
    const std::string f_tgt = base + "tgt.fmat";
    const std::string f_energy = base + "src_energy.fmat";
    const std::string f_f0 = base + "src_f0.fmat";
    const std::string f_align = base + "align.fmat";
    io::write_fmat_file(dir / f_src, src_norm.frames);
    io::write_fmat_file(dir / f_tgt, aligned_tgt);
    io::write_fmat_file(dir / f_energy, row_matrix(src_norm.energies));
    io::write_fmat_file(dir / f_f0, row_matrix(src_norm.f0));
    io::write_fmat_file(dir / f_align, row_matrix(align_idx));
    for (const auto& f : {f_src, f_tgt, f_energy, f_f0, f_align}) files.push_back(f);
    pairs.push_back({{"id", id},
                     {"split", split},
                     {"src", f_src},
                     {"tgt", f_tgt},
                     {"src_energy", f_energy},
                     {"src_f0", f_f0},
                     {"align", f_align}});

    if (split == "train") {
      for (Eigen::Index n = 0; n < src_norm.f0.size(); ++n) {
        if (src_norm.f0[n] > 0.0) src_f0_all.push_back(src_norm.f0[n]);
      }
      for (Eigen::Index n = 0; n < tgt_norm.f0.size(); ++n) {
        if (tgt_norm.f0[n] > 0.0) tgt_f0_all.push_back(tgt_norm.f0[n]);
      }
    }
  }

  const bool log_domain = !cfg.f0_linear_domain;
  auto vec_of = [](const std::vector<double>& v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
  };
  const auto src_stats = features::f0_stats(vec_of(src_f0_all), log_domain);
  const auto tgt_stats = features::f0_stats(vec_of(tgt_f0_all), log_domain);

  json stats;
  stats["src"] = {{"mean", src_stats.mean}, {"stddev", src_stats.stddev}};
  stats["tgt"] = {{"mean", tgt_stats.mean}, {"stddev", tgt_stats.stddev}};
  stats["log_domain"] = log_domain;
  write_text(dir / "f0_stats.json", stats.dump(2) + "\n");
  files.push_back("f0_stats.json");

  json doc;
  doc["dim"] = corpus.doc.at("dim");
  doc["sample_rate_hz"] = corpus.doc.at("sample_rate_hz");
  doc["frame_period_ms"] = corpus.doc.at("frame_period_ms");
  doc["pairs"] = pairs;
  write_text(dir / "prepared.json", doc.dump(2) + "\n");
  files.push_back("prepared.json");
  io::write_manifest(dir, files);
}

void run_train(const Config& cfg) {
  cfg.validate();
  const PreparedCorpus prepared = load_prepared(cfg);
  const auto [x, y] = concat_training(prepared);
  const fs::path dir = cfg.model_dir;
  fs::create_directories(dir);
  std::vector<std::string> files;

  // Identity alignment: the prepared pairs are already frame-aligned.
  features::AlignmentMap identity;
  identity.target_index.resize(static_cast<size_t>(x.cols()));
  for (Eigen::Index n = 0; n < x.cols(); ++n) {
    identity.target_index[static_cast<size_t>(n)] = static_cast<int>(n);
  }

  // One seed for every size: the partial Fisher-Yates draw makes a larger
  // dictionary an extension of a smaller one.
  const uint64_t exemplar_seed = Rng::mix(cfg.seed, 101);
  std::set<int> sizes(cfg.dict_sizes.begin(), cfg.dict_sizes.end());
  for (int k : sizes) {
    const auto dicts = nmf::build_exemplar_dictionaries(x, y, identity, k, exemplar_seed);
    const std::string ux_name = "enmf_" + std::to_string(k) + ".ux.fmat";
    const std::string uy_name = "enmf_" + std::to_string(k) + ".uy.fmat";
    io::write_fmat_file(dir / ux_name, dicts.ux.matrix());
    io::write_fmat_file(dir / uy_name, dicts.uy.matrix());
    files.push_back(ux_name);
    files.push_back(uy_name);
  }

  const auto edn_dicts =
      nmf::build_exemplar_dictionaries(x, y, identity, cfg.edn_bases, exemplar_seed);
  edn::EncoderParams theta =
      edn::init_encoder(static_cast<int>(x.rows()), cfg.hidden1, cfg.hidden2,
                        cfg.edn_bases, Rng::mix(cfg.seed, 201));
  const edn::TrainConfig tc = train_config(cfg);
  std::vector<edn::TrainLogRow> log;
  theta = edn::train_stage1(x, std::move(theta), edn_dicts.ux, tc, &log);
  edn::DecoderParams decoders{edn_dicts.ux.matrix(), edn_dicts.uy.matrix()};
  auto [theta2, decoders2] =
      edn::train_stage2(x, y, std::move(theta), std::move(decoders), tc, &log);

  json meta;
  meta["dim"] = x.rows();
  meta["bases"] = cfg.edn_bases;
  meta["hidden1"] = cfg.hidden1;
  meta["hidden2"] = cfg.hidden2;
  meta["seed"] = cfg.seed;
  meta["stage"] = 2;
  meta["alpha"] = cfg.alpha;
  meta["config"] = cfg.dump_parameters();
  io::Checkpoint ckpt{std::move(theta2), std::move(decoders2), edn_dicts.ux.matrix(),
                      edn_dicts.uy.matrix(), meta.dump(2)};
  write_checkpoint(dir / "model.ednc", ckpt);
  files.push_back("model.ednc");

  write_text(dir / "loss_log.csv", losslog_csv(log));
  files.push_back("loss_log.csv");
  io::write_manifest(dir, files);
}

void run_convert(const Config& cfg) {
  cfg.validate();
  const CorpusFiles corpus = load_corpus_index(cfg);
  const PreparedCorpus prepared = load_prepared(cfg);
  const fs::path model_dir = cfg.model_dir;

  const bool use_edn = cfg.system == "edn";
  int bases = cfg.dict_size;

  io::Checkpoint ckpt;
  Mat enmf_ux, enmf_uy;
  if (use_edn) {
    ckpt = io::read_checkpoint(model_dir / "model.ednc");
    bases = static_cast<int>(ckpt.decoders.ay_pre.cols());
  } else {
    if (bases == 0) bases = cfg.dict_sizes.front();
    const std::string stem = "enmf_" + std::to_string(bases);
    enmf_ux = io::read_fmat_file(model_dir / (stem + ".ux.fmat"));
    enmf_uy = io::read_fmat_file(model_dir / (stem + ".uy.fmat"));
  }
  const std::string label =
      (use_edn ? std::string("edn_") : std::string("enmf_")) + std::to_string(bases);
  const fs::path dir = fs::path(cfg.converted_dir) / label;
  fs::create_directories(dir);
  std::vector<std::string> files;

  const double period = corpus.doc.at("frame_period_ms").get<double>();
  json conv_list = json::array();
  for (const auto& utt : corpus.doc.at("utterances")) {
    if (utt.at("split").get<std::string>() != "eval") continue;
    const int id = utt.at("id").get<int>();
    features::Utterance src;
    src.frames = io::read_fmat_file(corpus.dir / utt.at("src").get<std::string>());
    src.f0 = read_f0(corpus.dir / utt.at("src_f0").get<std::string>());
    src.frame_period_ms = period;
    const auto norm = features::normalize_utterance(src, cfg.vad_floor_db);

    Mat converted_unit, codes;
    if (use_edn) {
      const nmf::Dictionary uy(edn::dict_reparam(ckpt.decoders.ay_pre));
      converted_unit = edn::edn_convert(norm.frames, ckpt.theta, uy);
      codes = edn::encoder_prenorm_codes(norm.frames, ckpt.theta);
    } else {
      const nmf::Dictionary ux(enmf_ux), uy(enmf_uy);
      const auto solved = nmf::solve_activation(norm.frames, ux, solve_options(cfg));
      codes = solved.activation;
      converted_unit = uy.matrix() * normalize_columns(codes, "convert: activation");
    }
    const Mat raw = features::energy_compensate(converted_unit, norm.energies);
    const Vec f0c = features::f0_convert(norm.f0, prepared.src_stats, prepared.tgt_stats,
                                         prepared.log_domain);

    const std::string f_frames = utt_name("conv", id, "fmat");
    const std::string f_f0 = utt_name("conv", id, "f0.fmat");
    const std::string f_codes = utt_name("conv", id, "codes.fmat");
    io::write_fmat_file(dir / f_frames, raw);
    io::write_fmat_file(dir / f_f0, row_matrix(f0c));
    io::write_fmat_file(dir / f_codes, codes);
    for (const auto& f : {f_frames, f_f0, f_codes}) files.push_back(f);
    conv_list.push_back({{"id", id}, {"frames", f_frames}, {"f0", f_f0}, {"codes", f_codes}});
  }
  require(!conv_list.empty(), ErrorCode::kInvalidArgument,
          "convert: corpus has no evaluation utterances");

  json meta;
  meta["label"] = label;
  meta["system"] = cfg.system;
  meta["bases"] = bases;
  meta["utterances"] = conv_list;
  write_text(dir / "meta.json", meta.dump(2) + "\n");
  files.push_back("meta.json");
  io::write_manifest(dir, files);
}

std::string run_evaluate(const Config& cfg) {
  cfg.validate();
  const CorpusFiles corpus = load_corpus_index(cfg);
  const fs::path conv_root = cfg.converted_dir;
  require(fs::is_directory(conv_root), ErrorCode::kIo,
          "evaluate: missing converted directory " + conv_root.string());

  std::vector<fs::path> system_dirs;
  for (const auto& entry : fs::directory_iterator(conv_root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "meta.json")) {
      system_dirs.push_back(entry.path());
    }
  }
  std::sort(system_dirs.begin(), system_dirs.end());
  require(!system_dirs.empty(), ErrorCode::kIo, "evaluate: no converted systems found");

  const double period = corpus.doc.at("frame_period_ms").get<double>();
  const double rate = corpus.doc.at("sample_rate_hz").get<double>();

  std::vector<eval::SystemReport> reports;
  for (const fs::path& sys_dir : system_dirs) {
    const json meta = read_json(sys_dir / "meta.json");
    eval::SystemReport rep;
    rep.label = meta.at("label").get<std::string>();
    double mcd_frames = 0.0, mcd_sum = 0.0, kld_sum = 0.0;
    Mat all_codes;

    for (const auto& conv : meta.at("utterances")) {
      const int id = conv.at("id").get<int>();
      // Reference target utterance.
      features::Utterance ref;
      bool found = false;
      for (const auto& utt : corpus.doc.at("utterances")) {
        if (utt.at("id").get<int>() == id) {
          ref.frames = io::read_fmat_file(corpus.dir / utt.at("tgt").get<std::string>());
          ref.f0 = read_f0(corpus.dir / utt.at("tgt_f0").get<std::string>());
          found = true;
          break;
        }
      }
      require(found, ErrorCode::kIo,
              "evaluate: utterance " + std::to_string(id) + " missing from corpus");
      ref.frame_period_ms = period;
      const auto ref_norm = features::normalize_utterance(ref, cfg.vad_floor_db);

      features::Utterance conv_utt;
      conv_utt.frames = io::read_fmat_file(sys_dir / conv.at("frames").get<std::string>());
      conv_utt.f0 = read_f0(sys_dir / conv.at("f0").get<std::string>());
      conv_utt.frame_period_ms = period;
      const auto conv_norm = features::normalize_utterance(conv_utt, cfg.vad_floor_db);

      const Mat conv_mcc =
          features::mcc_extract(conv_norm.frames, cfg.mcc_order, cfg.mel_filters, rate);
      const Mat ref_mcc =
          features::mcc_extract(ref_norm.frames, cfg.mcc_order, cfg.mel_filters, rate);
      const auto align = features::dtw_align(conv_mcc, ref_mcc);

      Mat ref_mcc_aligned(ref_mcc.rows(), conv_mcc.cols());
      Mat ref_aligned(ref_norm.frames.rows(), conv_norm.frames.cols());
      for (Eigen::Index n = 0; n < conv_mcc.cols(); ++n) {
        const int j = align.target_index[static_cast<size_t>(n)];
        ref_mcc_aligned.col(n) = ref_mcc.col(j);
        ref_aligned.col(n) = ref_norm.frames.col(j);
      }

      const auto m = eval::mcd(conv_mcc, ref_mcc_aligned);
      const double k = nmf::mean_frame_kld(ref_aligned, conv_norm.frames);
      rep.per_utterance_mcd_db.push_back(m.mean_db);
      rep.per_utterance_kld.push_back(k);
      mcd_sum += m.per_frame_db.sum();
      kld_sum += k * static_cast<double>(conv_mcc.cols());
      mcd_frames += static_cast<double>(conv_mcc.cols());

      const Mat codes = io::read_fmat_file(sys_dir / conv.at("codes").get<std::string>());
      const Eigen::Index old = all_codes.cols();
      all_codes.conservativeResize(codes.rows(), old + codes.cols());
      all_codes.rightCols(codes.cols()) = codes;
    }
    rep.mean_mcd_db = mcd_sum / mcd_frames;
    rep.mean_kld = kld_sum / mcd_frames;
    if (all_codes.size() > 0) rep.sparsity = eval::sparsity_stats(all_codes);
    reports.push_back(std::move(rep));
  }

  const fs::path dir = cfg.report_dir;
  fs::create_directories(dir);
  write_text(dir / "report.csv", eval::report_csv(reports));
  io::write_manifest(dir, {"report.csv"});
  return eval::report_table(reports);
}

}  // namespace pipeline
