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

#ifndef SPECON_CORE_CONFIG_HPP_
#define SPECON_CORE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace specon::pipeline {

// Flat key = value configuration driving the pipeline commands. Defaults
// describe the synthetic end-to-end experiment; every key can be overridden
// from a config file or the command line.
struct Config {
  uint64_t seed = 1;

  // Directories (synth output feeds prepare, and so on down the pipeline).
  std::string corpus_dir = "out/corpus";
  std::string prepared_dir = "out/prepared";
  std::string model_dir = "out/model";
  std::string converted_dir = "out/converted";
  std::string report_dir = "out/report";

  // Synthetic corpus.
  int synth_dim = 64;
  int synth_bases = 32;
  int synth_train_utterances = 20;
  int synth_eval_utterances = 5;
  int synth_frames_per_utterance = 100;
  int synth_silence_frames = 3;
  double synth_sparsity = 0.1;
  double synth_noise = 0.0;
  double synth_basis_spread = 2.0;
  double synth_src_f0_hz = 120.0;
  double synth_tgt_f0_hz = 220.0;
  double synth_src_f0_log_std = 0.12;
  double synth_tgt_f0_log_std = 0.18;
  double frame_period_ms = 5.0;
  double sample_rate_hz = 16000.0;

  // Feature extraction.
  double vad_floor_db = 40.0;
  int mcc_order = 24;
  int mel_filters = 40;
  bool f0_linear_domain = false;   // pitch statistics in linear Hz instead of log

  // Activation solving.
  int solver_max_iters = 200;
  double solver_tol = 1e-12;
  double sparsity_lambda = 0.0;
  double epsilon_floor = 1e-12;

  // Dictionaries: baseline sizes, and the trainable system's basis count.
  std::vector<int> dict_sizes = {32, 128};
  int edn_bases = 32;

  // Network and training.
  int hidden1 = 256;
  int hidden2 = 256;
  double alpha = 0.15;
  int batch_size = 512;
  double stage1_lr = 0.001;
  double stage2_lr = 0.01;
  double stage2_encoder_lr = 0.0;  // 0 = use stage2_lr
  int stage1_epochs = 100;
  int stage2_epochs = 150;
  double lr_decay_factor = 0.1;
  int lr_decay_every_epochs = 50;
  int max_lr_decays = 3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int early_stop_patience = 0;

  // Conversion.
  std::string system = "edn";      // "edn" or "enmf"
  int dict_size = 0;               // 0 = edn_bases / first baseline size

  // Parses key = value lines ('#' comments); unknown keys are errors.
  void load_file(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  std::vector<std::string> keys() const;
  std::string dump() const;        // sorted key = value text
  // Like dump(), without the directory keys; what goes into artifact
  // metadata, so runs into different locations stay byte-identical.
  std::string dump_parameters() const;
  void validate() const;
};

}  // namespace specon::pipeline

#endif  // SPECON_CORE_CONFIG_HPP_
