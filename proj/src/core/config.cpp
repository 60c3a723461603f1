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

#include "core/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "core/error.hpp"
#include "core/format.hpp"

namespace specon::pipeline {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int out = std::stoi(v, &pos);
    require(pos == v.size(), ErrorCode::kConfig, "config: bad integer for " + key);
    return out;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(ErrorCode::kConfig, "config: bad integer for " + key + ": '" + v + "'");
  }
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const uint64_t out = std::stoull(v, &pos);
    require(pos == v.size(), ErrorCode::kConfig, "config: bad integer for " + key);
    return out;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(ErrorCode::kConfig, "config: bad integer for " + key + ": '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double out = std::stod(v, &pos);
    require(pos == v.size(), ErrorCode::kConfig, "config: bad number for " + key);
    return out;
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(ErrorCode::kConfig, "config: bad number for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(ErrorCode::kConfig, "config: bad boolean for " + key + ": '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_int(key, item));
  }
  require(!out.empty(), ErrorCode::kConfig, "config: empty list for " + key);
  return out;
}

std::string fmt_int_list(const std::vector<int>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

struct Field {
  const char* name;
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

#define SPECON_FIELD_STR(member)                                      \
  {#member, [](Config& c, const std::string& v) { c.member = v; },    \
   [](const Config& c) { return c.member; }}
#define SPECON_FIELD_INT(member)                                      \
  {#member,                                                           \
   [](Config& c, const std::string& v) { c.member = parse_int(#member, v); }, \
   [](const Config& c) { return std::to_string(c.member); }}
#define SPECON_FIELD_U64(member)                                      \
  {#member,                                                           \
   [](Config& c, const std::string& v) { c.member = parse_u64(#member, v); }, \
   [](const Config& c) { return std::to_string(c.member); }}
#define SPECON_FIELD_DBL(member)                                      \
  {#member,                                                           \
   [](Config& c, const std::string& v) { c.member = parse_double(#member, v); }, \
   [](const Config& c) { return format_double(c.member); }}
#define SPECON_FIELD_BOOL(member)                                     \
  {#member,                                                           \
   [](Config& c, const std::string& v) { c.member = parse_bool(#member, v); }, \
   [](const Config& c) { return c.member ? std::string("true") : std::string("false"); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      SPECON_FIELD_U64(seed),
      SPECON_FIELD_STR(corpus_dir),
      SPECON_FIELD_STR(prepared_dir),
      SPECON_FIELD_STR(model_dir),
      SPECON_FIELD_STR(converted_dir),
      SPECON_FIELD_STR(report_dir),
      SPECON_FIELD_INT(synth_dim),
      SPECON_FIELD_INT(synth_bases),
      SPECON_FIELD_INT(synth_train_utterances),
      SPECON_FIELD_INT(synth_eval_utterances),
      SPECON_FIELD_INT(synth_frames_per_utterance),
      SPECON_FIELD_INT(synth_silence_frames),
      SPECON_FIELD_DBL(synth_sparsity),
      SPECON_FIELD_DBL(synth_noise),
      SPECON_FIELD_DBL(synth_basis_spread),
      SPECON_FIELD_DBL(synth_src_f0_hz),
      SPECON_FIELD_DBL(synth_tgt_f0_hz),
      SPECON_FIELD_DBL(synth_src_f0_log_std),
      SPECON_FIELD_DBL(synth_tgt_f0_log_std),
      SPECON_FIELD_DBL(frame_period_ms),
      SPECON_FIELD_DBL(sample_rate_hz),
      SPECON_FIELD_DBL(vad_floor_db),
      SPECON_FIELD_INT(mcc_order),
      SPECON_FIELD_INT(mel_filters),
      SPECON_FIELD_BOOL(f0_linear_domain),
      SPECON_FIELD_INT(solver_max_iters),
      SPECON_FIELD_DBL(solver_tol),
      SPECON_FIELD_DBL(sparsity_lambda),
      SPECON_FIELD_DBL(epsilon_floor),
      {"dict_sizes",
       [](Config& c, const std::string& v) { c.dict_sizes = parse_int_list("dict_sizes", v); },
       [](const Config& c) { return fmt_int_list(c.dict_sizes); }},
      SPECON_FIELD_INT(edn_bases),
      SPECON_FIELD_INT(hidden1),
      SPECON_FIELD_INT(hidden2),
      SPECON_FIELD_DBL(alpha),
      SPECON_FIELD_INT(batch_size),
      SPECON_FIELD_DBL(stage1_lr),
      SPECON_FIELD_DBL(stage2_lr),
      SPECON_FIELD_DBL(stage2_encoder_lr),
      SPECON_FIELD_INT(stage1_epochs),
      SPECON_FIELD_INT(stage2_epochs),
      SPECON_FIELD_DBL(lr_decay_factor),
      SPECON_FIELD_INT(lr_decay_every_epochs),
      SPECON_FIELD_INT(max_lr_decays),
      SPECON_FIELD_DBL(adam_beta1),
      SPECON_FIELD_DBL(adam_beta2),
      SPECON_FIELD_DBL(adam_eps),
      SPECON_FIELD_INT(early_stop_patience),
      SPECON_FIELD_STR(system),
      SPECON_FIELD_INT(dict_size),
  };
  return table;
}

const Field& find_field(const std::string& key) {
  for (const Field& f : fields()) {
    if (key == f.name) return f;
  }
  fail(ErrorCode::kConfig, "config: unknown key '" + key + "'");
}

}  // namespace

void Config::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.is_open(), ErrorCode::kConfig, "config: cannot open " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::kConfig,
            "config: missing '=' at " + path.string() + ":" + std::to_string(lineno));
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void Config::set(const std::string& key, const std::string& value) {
  find_field(key).set(*this, value);
}

std::string Config::get(const std::string& key) const {
  return find_field(key).get(*this);
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  for (const Field& f : fields()) out.push_back(f.name);
  return out;
}

namespace {

bool is_directory_key(const std::string& name) {
  return name.size() > 4 && name.compare(name.size() - 4, 4, "_dir") == 0;
}

}  // namespace

std::string Config::dump() const {
  std::vector<std::string> lines;
  for (const Field& f : fields()) {
    lines.push_back(std::string(f.name) + " = " + f.get(*this));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string Config::dump_parameters() const {
  std::vector<std::string> lines;
  for (const Field& f : fields()) {
    if (is_directory_key(f.name)) continue;
    lines.push_back(std::string(f.name) + " = " + f.get(*this));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

void Config::validate() const {
  require(synth_dim >= 2 && synth_bases >= 1, ErrorCode::kConfig,
          "config: synth dimensions must be positive");
  require(synth_sparsity > 0.0 && synth_sparsity <= 1.0, ErrorCode::kConfig,
          "config: synth_sparsity must be in (0, 1]");
  require(mcc_order >= 1 && mel_filters > mcc_order, ErrorCode::kConfig,
          "config: need mel_filters > mcc_order >= 1");
  require(batch_size >= 1, ErrorCode::kConfig, "config: batch_size must be >= 1");
  require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::kConfig,
          "config: alpha must lie in [0, 1]");
  require(!dict_sizes.empty(), ErrorCode::kConfig, "config: dict_sizes empty");
  require(edn_bases >= 1, ErrorCode::kConfig, "config: edn_bases must be >= 1");
  require(system == "edn" || system == "enmf", ErrorCode::kConfig,
          "config: system must be 'edn' or 'enmf'");
  require(solver_max_iters >= 1, ErrorCode::kConfig,
          "config: solver_max_iters must be >= 1");
  require(!corpus_dir.empty() && !prepared_dir.empty() && !model_dir.empty() &&
              !converted_dir.empty() && !report_dir.empty(),
          ErrorCode::kConfig, "config: directories must be nonempty");
}

}  // namespace specon::pipeline
