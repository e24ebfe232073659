// Copyright 2026 The SRKD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the srkd library. All functions return srkd_status; on
 * failure srkd_last_error() describes the problem (per-thread). Strings
 * returned through char** are owned by the caller: release them with
 * srkd_string_free. Option arguments are JSON objects; NULL means "{}". */
#ifndef SRKD_SRKD_H_
#define SRKD_SRKD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(SRKD_BUILDING_LIBRARY)
#define SRKD_API __attribute__((visibility("default")))
#else
#define SRKD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum srkd_status {
  SRKD_OK = 0,
  SRKD_ERR_DIMENSION = 1,
  SRKD_ERR_PARAMETER = 2,
  SRKD_ERR_INDEX = 3,
  SRKD_ERR_NUMERIC = 4,
  SRKD_ERR_DIVERGENCE = 5,
  SRKD_ERR_STATE = 6,
  SRKD_ERR_CONFIG = 7,
  SRKD_ERR_USAGE = 8,
  SRKD_ERR_VALIDATION = 9,
  SRKD_ERR_FORMAT = 10,
  SRKD_ERR_IO = 11,
  SRKD_ERR_NULL_ARGUMENT = 12,
  SRKD_ERR_INTERNAL = 13
} srkd_status;

typedef enum srkd_split { SRKD_SPLIT_TRAIN = 0, SRKD_SPLIT_TEST = 1 } srkd_split;

typedef struct srkd_dataset srkd_dataset;
typedef struct srkd_model srkd_model;
typedef struct srkd_report srkd_report;

SRKD_API const char* srkd_version(void);
SRKD_API const char* srkd_status_name(srkd_status status);
/* Process exit code for a status: 0 ok, 1 usage/validation, 2 I/O or format, 3 numeric. */
SRKD_API int srkd_exit_code(srkd_status status);
SRKD_API const char* srkd_last_error(void);
SRKD_API void srkd_string_free(char* s);

/* Datasets. Generator options use the same keys as the gen-data command. */
SRKD_API srkd_status srkd_dataset_generate(const char* options_json, srkd_dataset** out);
SRKD_API srkd_status srkd_dataset_load(const char* path, srkd_dataset** out);
SRKD_API srkd_status srkd_dataset_save(const srkd_dataset* data, const char* path);
SRKD_API srkd_status srkd_dataset_info(const srkd_dataset* data, char** out_json);
SRKD_API srkd_status srkd_dataset_size(const srkd_dataset* data, srkd_split split, size_t* out);
SRKD_API void srkd_dataset_free(srkd_dataset* data);

/* Models. Options: preset, timesteps, surrogate, surrogate_width, surrogate_slope, v_threshold, v_reset. */
SRKD_API srkd_status srkd_model_create(const srkd_dataset* data, const char* options_json, uint64_t seed,
                                       srkd_model** out);
SRKD_API srkd_status srkd_model_load(const char* path, srkd_model** out);
SRKD_API srkd_status srkd_model_save(const srkd_model* model, const char* path);
SRKD_API srkd_status srkd_model_info(const srkd_model* model, char** out_json);
SRKD_API srkd_status srkd_model_clone(const srkd_model* model, srkd_model** out);
/* Time-averaged logits for one sample; `logits` must hold num_classes values. */
SRKD_API srkd_status srkd_model_forward(const srkd_model* model, const srkd_dataset* data, srkd_split split,
                                        size_t index, double* logits, size_t num_classes);
SRKD_API srkd_status srkd_model_evaluate(const srkd_model* model, const srkd_dataset* data, srkd_split split,
                                         size_t threads, double* accuracy_percent);
/* Scope: "auto", "conv" or "all"; ranking: "global" or "per-layer". */
SRKD_API srkd_status srkd_model_prune(srkd_model* model, double ratio, const char* scope, const char* ranking,
                                      double* sparsity);
SRKD_API void srkd_model_free(srkd_model* model);

/* Training. Options: lr, momentum, epochs, batch_size, seed, threads, plus for distillation
 * mode, temperature, loss_alpha, kl_direction, harmonized, teacher_alpha. `teacher` is
 * required in sparse mode and ignored in default mode. */
SRKD_API srkd_status srkd_train(srkd_model* model, const srkd_dataset* data, const char* options_json,
                                srkd_report** out);
SRKD_API srkd_status srkd_distill(srkd_model* student, const srkd_model* teacher, const srkd_dataset* data,
                                  const char* options_json, srkd_report** out);
SRKD_API srkd_status srkd_report_json(const srkd_report* report, char** out);
SRKD_API srkd_status srkd_report_csv(const srkd_report* report, char** out);
SRKD_API srkd_status srkd_report_final_accuracy(const srkd_report* report, double* accuracy_percent);
SRKD_API void srkd_report_free(srkd_report* report);

/* Runs a CLI subcommand (gen-data, train, prune, distill, eval, report, run-suite)
 * with a flat JSON option object; the result summary is returned as JSON. */
SRKD_API srkd_status srkd_run_command(const char* command, const char* options_json, char** out_json);
/* NUL-separated list of subcommand names, terminated by an empty string. */
SRKD_API const char* srkd_command_names(void);

#ifdef __cplusplus
}
#endif

#endif /* SRKD_SRKD_H_ */
