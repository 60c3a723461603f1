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

// Exercises the shared library exactly as an external C client would: only
// through specon.h.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "specon/specon.h"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "specon_capi" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

specon_config* small_config(const fs::path& root) {
  specon_config* cfg = nullptr;
  REQUIRE(specon_config_create(&cfg) == SPECON_OK);
  auto set = [&](const char* k, const std::string& v) {
    REQUIRE(specon_config_set(cfg, k, v.c_str()) == SPECON_OK);
  };
  set("seed", "21");
  set("corpus_dir", (root / "corpus").string());
  set("prepared_dir", (root / "prepared").string());
  set("model_dir", (root / "model").string());
  set("converted_dir", (root / "converted").string());
  set("report_dir", (root / "report").string());
  set("synth_dim", "20");
  set("synth_bases", "6");
  set("synth_train_utterances", "3");
  set("synth_eval_utterances", "1");
  set("synth_frames_per_utterance", "30");
  set("synth_sparsity", "0.3");
  set("mcc_order", "6");
  set("mel_filters", "12");
  set("dict_sizes", "6");
  set("edn_bases", "6");
  set("hidden1", "16");
  set("hidden2", "16");
  set("batch_size", "32");
  set("stage1_epochs", "3");
  set("stage2_epochs", "3");
  set("solver_max_iters", "40");
  return cfg;
}

}  // namespace

TEST_CASE("status names and version strings exist") {
  CHECK(std::string(specon_version()) == "1.0.0");
  CHECK(std::string(specon_status_name(SPECON_OK)) == "ok");
  CHECK(std::strlen(specon_status_name(SPECON_ERR_DIMENSION)) > 0);
}

TEST_CASE("null arguments are rejected with a message") {
  CHECK(specon_config_create(nullptr) == SPECON_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(specon_last_error()) > 0);
  CHECK(specon_matrix_read(nullptr, nullptr) == SPECON_ERR_INVALID_ARGUMENT);
  CHECK(specon_run_synth(nullptr) == SPECON_ERR_INVALID_ARGUMENT);
}

TEST_CASE("matrices round-trip through the C surface") {
  const fs::path dir = temp_dir("matrix");
  const std::vector<double> data = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  specon_matrix* m = nullptr;
  REQUIRE(specon_matrix_create(2, 3, data.data(), &m) == SPECON_OK);
  CHECK(specon_matrix_rows(m) == 2);
  CHECK(specon_matrix_cols(m) == 3);

  const std::string path = (dir / "m.fmat").string();
  REQUIRE(specon_matrix_write(m, path.c_str()) == SPECON_OK);
  specon_matrix* back = nullptr;
  REQUIRE(specon_matrix_read(path.c_str(), &back) == SPECON_OK);
  std::vector<double> out(6);
  REQUIRE(specon_matrix_data(back, out.data(), out.size()) == SPECON_OK);
  CHECK(out == data);

  std::vector<double> tiny(2);
  CHECK(specon_matrix_data(back, tiny.data(), tiny.size()) ==
        SPECON_ERR_INVALID_ARGUMENT);
  CHECK(specon_matrix_read((dir / "missing.fmat").string().c_str(), &back) ==
        SPECON_ERR_IO);
  specon_matrix_destroy(m);
  specon_matrix_destroy(back);
}

TEST_CASE("config rejects unknown keys and reports values") {
  specon_config* cfg = nullptr;
  REQUIRE(specon_config_create(&cfg) == SPECON_OK);
  CHECK(specon_config_set(cfg, "no_such_key", "1") == SPECON_ERR_CONFIG);
  CHECK(std::string(specon_last_error()).find("no_such_key") != std::string::npos);
  REQUIRE(specon_config_set(cfg, "alpha", "0.3") == SPECON_OK);
  char buf[32];
  REQUIRE(specon_config_get(cfg, "alpha", buf, sizeof(buf)) == SPECON_OK);
  CHECK(std::string(buf) == "0.3");
  specon_config_destroy(cfg);
}

TEST_CASE("the full pipeline runs through the C surface") {
  const fs::path root = temp_dir("pipeline");
  specon_config* cfg = small_config(root);

  REQUIRE(specon_run_synth(cfg) == SPECON_OK);
  REQUIRE(specon_run_prepare(cfg) == SPECON_OK);
  REQUIRE(specon_run_train(cfg) == SPECON_OK);
  REQUIRE(specon_run_convert(cfg) == SPECON_OK);
  REQUIRE(specon_config_set(cfg, "system", "enmf") == SPECON_OK);
  REQUIRE(specon_run_convert(cfg) == SPECON_OK);

  std::vector<char> table(1 << 14);
  REQUIRE(specon_run_evaluate(cfg, table.data(), table.size()) == SPECON_OK);
  CHECK(std::string(table.data()).find("edn_6") != std::string::npos);
  CHECK(std::string(table.data()).find("enmf_6") != std::string::npos);

  // The trained model loads and converts via opaque handles.
  specon_model* model = nullptr;
  const std::string ckpt = (root / "model" / "model.ednc").string();
  REQUIRE(specon_model_load(ckpt.c_str(), &model) == SPECON_OK);

  specon_matrix* frames = nullptr;
  const fs::path pair = root / "prepared" / "pair_003.src.fmat";
  REQUIRE(specon_matrix_read(pair.string().c_str(), &frames) == SPECON_OK);
  specon_matrix* converted = nullptr;
  REQUIRE(specon_model_convert(model, frames, &converted) == SPECON_OK);
  CHECK(specon_matrix_rows(converted) == specon_matrix_rows(frames));
  CHECK(specon_matrix_cols(converted) == specon_matrix_cols(frames));

  // Converted columns are unit-sum distributions.
  const size_t rows = specon_matrix_rows(converted);
  const size_t cols = specon_matrix_cols(converted);
  std::vector<double> data(rows * cols);
  REQUIRE(specon_matrix_data(converted, data.data(), data.size()) == SPECON_OK);
  for (size_t c = 0; c < cols; ++c) {
    double sum = 0.0;
    for (size_t r = 0; r < rows; ++r) {
      const double v = data[r * cols + c];
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }

  specon_matrix* codes = nullptr;
  REQUIRE(specon_model_encode(model, frames, 1, &codes) == SPECON_OK);
  CHECK(specon_matrix_rows(codes) == 6);

  // Baseline conversion through the C surface.
  specon_matrix* ux = nullptr;
  specon_matrix* uy = nullptr;
  REQUIRE(specon_matrix_read((root / "model" / "enmf_6.ux.fmat").string().c_str(),
                             &ux) == SPECON_OK);
  REQUIRE(specon_matrix_read((root / "model" / "enmf_6.uy.fmat").string().c_str(),
                             &uy) == SPECON_OK);
  specon_matrix* baseline = nullptr;
  REQUIRE(specon_enmf_convert(frames, ux, uy, 50, 0.0, &baseline) == SPECON_OK);
  CHECK(specon_matrix_cols(baseline) == specon_matrix_cols(frames));

  // Dimension mismatches surface as status codes, not crashes.
  specon_matrix* bad = nullptr;
  const std::vector<double> one(3, 1.0 / 3.0);
  REQUIRE(specon_matrix_create(3, 1, one.data(), &bad) == SPECON_OK);
  specon_matrix* out = nullptr;
  CHECK(specon_model_convert(model, bad, &out) == SPECON_ERR_DIMENSION);

  specon_matrix_destroy(bad);
  specon_matrix_destroy(baseline);
  specon_matrix_destroy(ux);
  specon_matrix_destroy(uy);
  specon_matrix_destroy(codes);
  specon_matrix_destroy(converted);
  specon_matrix_destroy(frames);
  specon_model_destroy(model);
  specon_config_destroy(cfg);
}
