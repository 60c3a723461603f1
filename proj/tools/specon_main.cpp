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

// Command-line front end. All of the work happens behind the shared
// library's C interface; this file only parses flags and forwards them.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specon/specon.h"

namespace {

struct ConfigDeleter {
  void operator()(specon_config* cfg) const { specon_config_destroy(cfg); }
};
using ConfigPtr = std::unique_ptr<specon_config, ConfigDeleter>;

struct CommonFlags {
  std::string config_path;
  std::string seed;
  std::string out_dir;
  std::string system;
  std::string dict_size;
};

void add_common_flags(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--config", flags->config_path, "configuration file (key = value)");
  cmd->add_option("--seed", flags->seed, "random seed");
  cmd->add_option("--out", flags->out_dir, "output directory for this command");
  cmd->add_option("--system", flags->system, "conversion system: enmf or edn");
  cmd->add_option("--dict-size", flags->dict_size, "baseline dictionary size");
}

int fail_with(specon_status status, const char* what) {
  std::fprintf(stderr, "specon: %s failed (%s): %s\n", what,
               specon_status_name(status), specon_last_error());
  return 1;
}

// Applies the config file and flag overrides; --out targets the key that the
// active command writes into.
int apply_flags(specon_config* cfg, const CommonFlags& flags, const char* out_key) {
  specon_status s = SPECON_OK;
  if (!flags.config_path.empty() &&
      (s = specon_config_load(cfg, flags.config_path.c_str())) != SPECON_OK) {
    return fail_with(s, "loading config");
  }
  if (!flags.seed.empty() &&
      (s = specon_config_set(cfg, "seed", flags.seed.c_str())) != SPECON_OK) {
    return fail_with(s, "setting seed");
  }
  if (!flags.out_dir.empty() &&
      (s = specon_config_set(cfg, out_key, flags.out_dir.c_str())) != SPECON_OK) {
    return fail_with(s, "setting output directory");
  }
  if (!flags.system.empty() &&
      (s = specon_config_set(cfg, "system", flags.system.c_str())) != SPECON_OK) {
    return fail_with(s, "setting system");
  }
  if (!flags.dict_size.empty() &&
      (s = specon_config_set(cfg, "dict_size", flags.dict_size.c_str())) != SPECON_OK) {
    return fail_with(s, "setting dictionary size");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral conversion: exemplar NMF baselines and the trainable "
               "encoder-decoder system"};
  app.require_subcommand(1);

  CommonFlags synth_flags, prepare_flags, train_flags, convert_flags, evaluate_flags;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic parallel corpus");
  CLI::App* prepare =
      app.add_subcommand("prepare", "VAD, normalization, and DTW alignment");
  CLI::App* train = app.add_subcommand("train", "two-stage encoder/dictionary training");
  CLI::App* convert = app.add_subcommand("convert", "convert the evaluation split");
  CLI::App* evaluate = app.add_subcommand("evaluate", "score converted utterances");
  add_common_flags(synth, &synth_flags);
  add_common_flags(prepare, &prepare_flags);
  add_common_flags(train, &train_flags);
  add_common_flags(convert, &convert_flags);
  add_common_flags(evaluate, &evaluate_flags);

  CLI11_PARSE(app, argc, argv);

  ConfigPtr cfg;
  {
    specon_config* raw = nullptr;
    const specon_status s = specon_config_create(&raw);
    if (s != SPECON_OK) return fail_with(s, "creating config");
    cfg.reset(raw);
  }

  if (synth->parsed()) {
    if (int rc = apply_flags(cfg.get(), synth_flags, "corpus_dir")) return rc;
    const specon_status s = specon_run_synth(cfg.get());
    if (s != SPECON_OK) return fail_with(s, "synth");
    std::printf("synth: corpus written\n");
  } else if (prepare->parsed()) {
    if (int rc = apply_flags(cfg.get(), prepare_flags, "prepared_dir")) return rc;
    const specon_status s = specon_run_prepare(cfg.get());
    if (s != SPECON_OK) return fail_with(s, "prepare");
    std::printf("prepare: aligned pairs written\n");
  } else if (train->parsed()) {
    if (int rc = apply_flags(cfg.get(), train_flags, "model_dir")) return rc;
    const specon_status s = specon_run_train(cfg.get());
    if (s != SPECON_OK) return fail_with(s, "train");
    std::printf("train: checkpoint written\n");
  } else if (convert->parsed()) {
    if (int rc = apply_flags(cfg.get(), convert_flags, "converted_dir")) return rc;
    const specon_status s = specon_run_convert(cfg.get());
    if (s != SPECON_OK) return fail_with(s, "convert");
    std::printf("convert: converted features written\n");
  } else if (evaluate->parsed()) {
    if (int rc = apply_flags(cfg.get(), evaluate_flags, "report_dir")) return rc;
    std::vector<char> table(1 << 16);
    const specon_status s = specon_run_evaluate(cfg.get(), table.data(), table.size());
    if (s != SPECON_OK) return fail_with(s, "evaluate");
    std::printf("%s", table.data());
  }
  return 0;
}
