/* Copyright 2026 The specon authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* specon: exemplar-based NMF spectral conversion and its encoder-decoder
 * reformulation with trainable dictionaries.
 *
 * C interface over opaque handles. Every fallible function returns a
 * specon_status; SPECON_OK is zero. On failure, specon_last_error() returns a
 * thread-local description of the most recent error in the calling thread.
 * Handles are created and destroyed by matching specon_*_create/_destroy
 * calls; destroy functions accept NULL.
 */

#ifndef SPECON_SPECON_H_
#define SPECON_SPECON_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SPECON_API __declspec(dllexport)
#else
#define SPECON_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum specon_status {
  SPECON_OK = 0,
  SPECON_ERR_INVALID_ARGUMENT = 1,
  SPECON_ERR_DOMAIN = 2,          /* values outside the mathematical domain */
  SPECON_ERR_DIMENSION = 3,       /* shape mismatch */
  SPECON_ERR_CONFIG = 4,
  SPECON_ERR_IO = 5,
  SPECON_ERR_NUMERIC = 6,         /* non-finite intermediate results */
  SPECON_ERR_INTERNAL = 7
} specon_status;

/* Flat pipeline configuration (key = value). */
typedef struct specon_config specon_config;
/* Dense real matrix; feature frames are columns. */
typedef struct specon_matrix specon_matrix;
/* Trained encoder-decoder model loaded from a checkpoint. */
typedef struct specon_model specon_model;

SPECON_API const char* specon_version(void);
SPECON_API const char* specon_status_name(specon_status status);
/* Description of the calling thread's most recent error ("" if none). */
SPECON_API const char* specon_last_error(void);

/* ---- configuration ------------------------------------------------------ */

SPECON_API specon_status specon_config_create(specon_config** out);
SPECON_API void specon_config_destroy(specon_config* cfg);
/* Parses a key = value file ('#' comments); unknown keys are errors. */
SPECON_API specon_status specon_config_load(specon_config* cfg, const char* path);
SPECON_API specon_status specon_config_set(specon_config* cfg, const char* key,
                                           const char* value);
/* Copies the printed value of key into buf (NUL-terminated, truncating). */
SPECON_API specon_status specon_config_get(const specon_config* cfg, const char* key,
                                           char* buf, size_t buf_size);

/* ---- matrices ------------------------------------------------------------ */

/* data is row-major rows x cols; it is copied. */
SPECON_API specon_status specon_matrix_create(size_t rows, size_t cols,
                                              const double* data,
                                              specon_matrix** out);
SPECON_API void specon_matrix_destroy(specon_matrix* m);
SPECON_API size_t specon_matrix_rows(const specon_matrix* m);
SPECON_API size_t specon_matrix_cols(const specon_matrix* m);
/* Copies the entries, row-major, into buf (length rows * cols). */
SPECON_API specon_status specon_matrix_data(const specon_matrix* m, double* buf,
                                            size_t len);
/* FMAT container: "FMAT" magic, u32 version 1, u32 rows, u32 cols, float64
 * payload, row-major, little-endian; round-trips are bit-exact. */
SPECON_API specon_status specon_matrix_read(const char* path, specon_matrix** out);
SPECON_API specon_status specon_matrix_write(const specon_matrix* m, const char* path);

/* ---- models -------------------------------------------------------------- */

SPECON_API specon_status specon_model_load(const char* checkpoint_path,
                                           specon_model** out);
SPECON_API void specon_model_destroy(specon_model* model);
/* Converts unit-sum source frames to the target speaker. */
SPECON_API specon_status specon_model_convert(const specon_model* model,
                                              const specon_matrix* frames,
                                              specon_matrix** out);
/* Encoder codes for the given frames; prenormalized selects the rectified
 * codes before unit-sum normalization (their zeros measure sparsity). */
SPECON_API specon_status specon_model_encode(const specon_model* model,
                                             const specon_matrix* frames,
                                             int prenormalized,
                                             specon_matrix** out);

/* Baseline conversion: solve activations of frames against source_dict by
 * multiplicative updates and decode them with target_dict. */
SPECON_API specon_status specon_enmf_convert(const specon_matrix* frames,
                                             const specon_matrix* source_dict,
                                             const specon_matrix* target_dict,
                                             int max_iters, double sparsity_lambda,
                                             specon_matrix** out);

/* ---- pipeline commands --------------------------------------------------- */

SPECON_API specon_status specon_run_synth(const specon_config* cfg);
SPECON_API specon_status specon_run_prepare(const specon_config* cfg);
SPECON_API specon_status specon_run_train(const specon_config* cfg);
SPECON_API specon_status specon_run_convert(const specon_config* cfg);
/* On success, if table/table_size are nonzero, copies the human-readable
 * report table (NUL-terminated, truncating). */
SPECON_API specon_status specon_run_evaluate(const specon_config* cfg, char* table,
                                             size_t table_size);

#ifdef __cplusplus
}
#endif

#endif /* SPECON_SPECON_H_ */
