/*
 * Copyright 2026 The ubru Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *  http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to libubru.
 *
 * Objects are opaque handles returned by the constructor-style functions
 * (create, load, generate, train) and released with the matching free call.
 * Fallible functions return a ubru_status; on failure ubru_last_error()
 * describes the problem. The message is per thread and stays valid until the
 * next failing call on that thread. No function takes ownership of caller
 * buffers.
 *
 * Arrays are row-major doubles. Inputs are F x T (one column per timestep),
 * posteriors T x H (one row per timestep), matching the checkpoint layout.
 */

#ifndef UBRU_UBRU_H_
#define UBRU_UBRU_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define UBRU_API __declspec(dllexport)
#else
#define UBRU_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ubru_status {
  UBRU_OK = 0,
  UBRU_ERR_INVALID_ARGUMENT = 1, /* null handle/pointer, bad enum value */
  UBRU_ERR_DIMENSION = 2,
  UBRU_ERR_DOMAIN = 3,
  UBRU_ERR_NON_FINITE = 4,
  UBRU_ERR_CONFIG = 5,
  UBRU_ERR_IO = 6,
  UBRU_ERR_MALFORMED = 7,
  UBRU_ERR_VERSION = 8,
  UBRU_ERR_SHAPE = 9,
  UBRU_ERR_LIMIT = 10,
  UBRU_ERR_DEGENERATE = 11,
  UBRU_ERR_INTERNAL = 99
} ubru_status;

typedef enum ubru_backward_mode {
  UBRU_BACKWARD_NONE = 0,
  UBRU_BACKWARD_KALMAN = 1,
  UBRU_BACKWARD_HMM = 2
} ubru_backward_mode;

typedef enum ubru_param_kind {
  UBRU_PARAM_W = 0, /* F x H */
  UBRU_PARAM_B = 1, /* H */
  UBRU_PARAM_U_TAU11 = 2,
  UBRU_PARAM_U_TAU01 = 3,
  UBRU_PARAM_U_RHO0 = 4
} ubru_param_kind;

typedef enum ubru_check_suite {
  UBRU_CHECK_GRADS = 0,
  UBRU_CHECK_EQUIVALENCE = 1,
  UBRU_CHECK_ORACLE = 2,
  UBRU_CHECK_ALL = 3
} ubru_check_suite;

typedef enum ubru_fault {
  UBRU_FAULT_NONE = 0,
  UBRU_FAULT_TAU01_SIGN = 1 /* mutation test: flips the tau01 term of the prior */
} ubru_fault;

typedef struct ubru_params ubru_params;
typedef struct ubru_dataset ubru_dataset;
typedef struct ubru_model ubru_model;

UBRU_API const char* ubru_version(void);
UBRU_API const char* ubru_last_error(void);
UBRU_API const char* ubru_status_string(ubru_status status);

/* ---- single layer ------------------------------------------------------ */

/* Zero weights and logits (tau11 = tau01 = rho0 = 0.5). */
UBRU_API ubru_status ubru_params_create(size_t input_dim, size_t hidden_dim, ubru_params** out);
UBRU_API void ubru_params_free(ubru_params* params);
UBRU_API ubru_status ubru_params_dims(const ubru_params* params, size_t* input_dim,
                                      size_t* hidden_dim);
/* `len` must equal the element count of the selected tensor. */
UBRU_API ubru_status ubru_params_set(ubru_params* params, ubru_param_kind kind,
                                     const double* data, size_t len);
UBRU_API ubru_status ubru_params_get(const ubru_params* params, ubru_param_kind kind,
                                     double* data, size_t len);

/* gamma_out receives T x H posteriors. */
UBRU_API ubru_status ubru_smooth(const ubru_params* params, const double* x, size_t input_dim,
                                 size_t steps, ubru_backward_mode mode, double* gamma_out);

/* Gradient of a loss with dL/dgamma = d_gamma (T x H). The result is written
 * into `grads_out`, which must have the same dimensions as `params`. */
UBRU_API ubru_status ubru_backprop(const ubru_params* params, const double* x,
                                   size_t input_dim, size_t steps, ubru_backward_mode mode,
                                   const double* d_gamma, ubru_params* grads_out);

/* ---- datasets ---------------------------------------------------------- */

typedef struct ubru_synthetic_options {
  size_t num_seqs;
  size_t seq_len;
  size_t features;
  size_t hidden;
  uint64_t seed;
  double tau11;
  double tau01;
  double rho0;
  double noise;
} ubru_synthetic_options;

/* tau11 = 0.9, tau01 = 0.1, rho0 = 0.5, noise = 1.0; counts zero. */
UBRU_API ubru_synthetic_options ubru_synthetic_defaults(void);
UBRU_API ubru_status ubru_dataset_generate(const ubru_synthetic_options* opts,
                                           ubru_dataset** out);
UBRU_API ubru_status ubru_dataset_load(const char* path, ubru_dataset** out);
UBRU_API ubru_status ubru_dataset_save(const ubru_dataset* data, const char* path);
UBRU_API void ubru_dataset_free(ubru_dataset* data);
UBRU_API size_t ubru_dataset_size(const ubru_dataset* data);
UBRU_API size_t ubru_dataset_feature_dim(const ubru_dataset* data);
UBRU_API size_t ubru_dataset_num_frames(const ubru_dataset* data);

/* ---- models ------------------------------------------------------------ */

typedef void (*ubru_epoch_fn)(size_t epoch, double loss, void* user);

/* config_json holds a training configuration (see README). */
UBRU_API ubru_status ubru_train(const ubru_dataset* data, const char* config_json,
                                ubru_epoch_fn on_epoch, void* user, ubru_model** out);
UBRU_API ubru_status ubru_model_load(const char* path, ubru_model** out);
UBRU_API ubru_status ubru_model_save(const ubru_model* model, const char* path);
UBRU_API void ubru_model_free(ubru_model* model);
UBRU_API size_t ubru_model_num_classes(const ubru_model* model);
UBRU_API size_t ubru_model_output_dim(const ubru_model* model);
UBRU_API double ubru_model_final_loss(const ubru_model* model);

typedef struct ubru_metrics {
  double accuracy;
  double mean_cross_entropy;
  size_t frames;
  size_t correct;
} ubru_metrics;

/* `confusion` may be NULL; otherwise it needs num_classes^2 entries and is
 * filled row-major as confusion[true][predicted]. */
UBRU_API ubru_status ubru_evaluate(const ubru_model* model, const ubru_dataset* data,
                                   ubru_metrics* out, uint64_t* confusion, size_t confusion_len);

/* Writes one {"gamma": [[...]]} line per sequence with the output of the
 * model's last recurrent layer. mode < 0 keeps each layer's own mode;
 * otherwise it is a ubru_backward_mode applied to every layer. */
UBRU_API ubru_status ubru_smooth_dataset(const ubru_model* model, const ubru_dataset* data,
                                         int mode, const char* out_path);

/* ---- verification ------------------------------------------------------ */

typedef struct ubru_trial_report {
  const char* suite;
  size_t index;
  uint64_t seed;
  int passed;
  double max_error;
  const char* detail;
} ubru_trial_report;

typedef void (*ubru_trial_fn)(const ubru_trial_report* report, void* user);

typedef struct ubru_check_summary {
  size_t trials;
  size_t failures;
  double max_error;
  uint64_t first_failing_seed;
} ubru_check_summary;

UBRU_API ubru_status ubru_check_run(ubru_check_suite suite, size_t trials, uint64_t seed,
                                    ubru_fault fault, ubru_trial_fn on_trial, void* user,
                                    ubru_check_summary* out);

#ifdef __cplusplus
}
#endif

#endif /* UBRU_UBRU_H_ */
