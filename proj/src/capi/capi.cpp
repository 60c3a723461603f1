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

#include "specon/specon.h"

#include <cstring>
#include <string>

#include "core/checkpoint.hpp"
#include "core/config.hpp"
#include "core/edn.hpp"
#include "core/fmat.hpp"
#include "core/nmf.hpp"
#include "core/pipeline.hpp"

struct specon_config {
  specon::pipeline::Config cfg;
};

struct specon_matrix {
  specon::Mat m;
};

struct specon_model {
  specon::io::Checkpoint ckpt;
};

namespace {

thread_local std::string t_last_error;

specon_status map_code(specon::ErrorCode code) {
  using specon::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return SPECON_ERR_INVALID_ARGUMENT;
    case ErrorCode::kDomain: return SPECON_ERR_DOMAIN;
    case ErrorCode::kDimension: return SPECON_ERR_DIMENSION;
    case ErrorCode::kConfig: return SPECON_ERR_CONFIG;
    case ErrorCode::kIo: return SPECON_ERR_IO;
    case ErrorCode::kNumeric: return SPECON_ERR_NUMERIC;
    case ErrorCode::kInternal: return SPECON_ERR_INTERNAL;
  }
  return SPECON_ERR_INTERNAL;
}

specon_status set_error(specon_status status, const char* msg) {
  t_last_error = msg;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
specon_status guarded(Fn&& fn) {
  try {
    fn();
    t_last_error.clear();
    return SPECON_OK;
  } catch (const specon::Error& e) {
    t_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return SPECON_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return SPECON_ERR_INTERNAL;
  }
}

specon_status require_arg(bool ok, const char* msg) {
  return ok ? SPECON_OK : set_error(SPECON_ERR_INVALID_ARGUMENT, msg);
}

void copy_string(const std::string& s, char* buf, size_t buf_size) {
  if (buf == nullptr || buf_size == 0) return;
  const size_t n = s.size() < buf_size - 1 ? s.size() : buf_size - 1;
  std::memcpy(buf, s.data(), n);
  buf[n] = '\0';
}

}  // namespace

extern "C" {

const char* specon_version(void) { return "1.0.0"; }

const char* specon_status_name(specon_status status) {
  switch (status) {
    case SPECON_OK: return "ok";
    case SPECON_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SPECON_ERR_DOMAIN: return "domain error";
    case SPECON_ERR_DIMENSION: return "dimension mismatch";
    case SPECON_ERR_CONFIG: return "configuration error";
    case SPECON_ERR_IO: return "io error";
    case SPECON_ERR_NUMERIC: return "numeric error";
    case SPECON_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* specon_last_error(void) { return t_last_error.c_str(); }

specon_status specon_config_create(specon_config** out) {
  if (auto s = require_arg(out != nullptr, "config_create: out is null")) return s;
  return guarded([&] { *out = new specon_config(); });
}

void specon_config_destroy(specon_config* cfg) { delete cfg; }

specon_status specon_config_load(specon_config* cfg, const char* path) {
  if (auto s = require_arg(cfg != nullptr && path != nullptr,
                           "config_load: null argument")) {
    return s;
  }
  return guarded([&] { cfg->cfg.load_file(path); });
}

specon_status specon_config_set(specon_config* cfg, const char* key, const char* value) {
  if (auto s = require_arg(cfg != nullptr && key != nullptr && value != nullptr,
                           "config_set: null argument")) {
    return s;
  }
  return guarded([&] { cfg->cfg.set(key, value); });
}

specon_status specon_config_get(const specon_config* cfg, const char* key, char* buf,
                                size_t buf_size) {
  if (auto s = require_arg(cfg != nullptr && key != nullptr && buf != nullptr &&
                               buf_size > 0,
                           "config_get: null argument")) {
    return s;
  }
  return guarded([&] { copy_string(cfg->cfg.get(key), buf, buf_size); });
}

specon_status specon_matrix_create(size_t rows, size_t cols, const double* data,
                                   specon_matrix** out) {
  if (auto s = require_arg(out != nullptr && (data != nullptr || rows * cols == 0),
                           "matrix_create: null argument")) {
    return s;
  }
  return guarded([&] {
    specon::Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < rows; ++r) {
      for (size_t c = 0; c < cols; ++c) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            data[r * cols + c];
      }
    }
    *out = new specon_matrix{std::move(m)};
  });
}

void specon_matrix_destroy(specon_matrix* m) { delete m; }

size_t specon_matrix_rows(const specon_matrix* m) {
  return m == nullptr ? 0 : static_cast<size_t>(m->m.rows());
}

size_t specon_matrix_cols(const specon_matrix* m) {
  return m == nullptr ? 0 : static_cast<size_t>(m->m.cols());
}

specon_status specon_matrix_data(const specon_matrix* m, double* buf, size_t len) {
  if (auto s = require_arg(m != nullptr && buf != nullptr, "matrix_data: null argument")) {
    return s;
  }
  if (auto s = require_arg(len >= static_cast<size_t>(m->m.size()),
                           "matrix_data: buffer too small")) {
    return s;
  }
  return guarded([&] {
    size_t i = 0;
    for (Eigen::Index r = 0; r < m->m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m->m.cols(); ++c) buf[i++] = m->m(r, c);
    }
  });
}

specon_status specon_matrix_read(const char* path, specon_matrix** out) {
  if (auto s = require_arg(path != nullptr && out != nullptr,
                           "matrix_read: null argument")) {
    return s;
  }
  return guarded([&] { *out = new specon_matrix{specon::io::read_fmat_file(path)}; });
}

specon_status specon_matrix_write(const specon_matrix* m, const char* path) {
  if (auto s = require_arg(m != nullptr && path != nullptr,
                           "matrix_write: null argument")) {
    return s;
  }
  return guarded([&] { specon::io::write_fmat_file(path, m->m); });
}

specon_status specon_model_load(const char* checkpoint_path, specon_model** out) {
  if (auto s = require_arg(checkpoint_path != nullptr && out != nullptr,
                           "model_load: null argument")) {
    return s;
  }
  return guarded([&] {
    *out = new specon_model{specon::io::read_checkpoint(checkpoint_path)};
  });
}

void specon_model_destroy(specon_model* model) { delete model; }

specon_status specon_model_convert(const specon_model* model,
                                   const specon_matrix* frames, specon_matrix** out) {
  if (auto s = require_arg(model != nullptr && frames != nullptr && out != nullptr,
                           "model_convert: null argument")) {
    return s;
  }
  return guarded([&] {
    const specon::nmf::Dictionary uy(
        specon::edn::dict_reparam(model->ckpt.decoders.ay_pre));
    *out = new specon_matrix{
        specon::edn::edn_convert(frames->m, model->ckpt.theta, uy)};
  });
}

specon_status specon_model_encode(const specon_model* model, const specon_matrix* frames,
                                  int prenormalized, specon_matrix** out) {
  if (auto s = require_arg(model != nullptr && frames != nullptr && out != nullptr,
                           "model_encode: null argument")) {
    return s;
  }
  return guarded([&] {
    *out = new specon_matrix{
        prenormalized != 0
            ? specon::edn::encoder_prenorm_codes(frames->m, model->ckpt.theta)
            : specon::edn::encoder_forward(frames->m, model->ckpt.theta)};
  });
}

specon_status specon_enmf_convert(const specon_matrix* frames,
                                  const specon_matrix* source_dict,
                                  const specon_matrix* target_dict, int max_iters,
                                  double sparsity_lambda, specon_matrix** out) {
  if (auto s = require_arg(frames != nullptr && source_dict != nullptr &&
                               target_dict != nullptr && out != nullptr,
                           "enmf_convert: null argument")) {
    return s;
  }
  return guarded([&] {
    specon::nmf::SolveOptions opts;
    opts.max_iters = max_iters;
    opts.sparsity_lambda = sparsity_lambda;
    const specon::nmf::Dictionary ux(source_dict->m), uy(target_dict->m);
    *out = new specon_matrix{specon::nmf::enmf_convert(frames->m, ux, uy, opts)};
  });
}

specon_status specon_run_synth(const specon_config* cfg) {
  if (auto s = require_arg(cfg != nullptr, "run_synth: config is null")) return s;
  return guarded([&] { specon::pipeline::run_synth(cfg->cfg); });
}

specon_status specon_run_prepare(const specon_config* cfg) {
  if (auto s = require_arg(cfg != nullptr, "run_prepare: config is null")) return s;
  return guarded([&] { specon::pipeline::run_prepare(cfg->cfg); });
}

specon_status specon_run_train(const specon_config* cfg) {
  if (auto s = require_arg(cfg != nullptr, "run_train: config is null")) return s;
  return guarded([&] { specon::pipeline::run_train(cfg->cfg); });
}

specon_status specon_run_convert(const specon_config* cfg) {
  if (auto s = require_arg(cfg != nullptr, "run_convert: config is null")) return s;
  return guarded([&] { specon::pipeline::run_convert(cfg->cfg); });
}

specon_status specon_run_evaluate(const specon_config* cfg, char* table,
                                  size_t table_size) {
  if (auto s = require_arg(cfg != nullptr, "run_evaluate: config is null")) return s;
  return guarded([&] {
    const std::string text = specon::pipeline::run_evaluate(cfg->cfg);
    if (table != nullptr && table_size > 0) copy_string(text, table, table_size);
  });
}

}  // extern "C"
