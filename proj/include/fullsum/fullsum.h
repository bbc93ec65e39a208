// include/fullsum/fullsum.h
//
// Copyright 2026 The fullsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FULLSUM_FULLSUM_H_
#define FULLSUM_FULLSUM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(FULLSUM_BUILDING_LIBRARY)
#define FS_API __attribute__((visibility("default")))
#else
#define FS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns a status; on failure fs_last_error() describes it.
 * The message is thread-local and valid until the next failing call on the
 * same thread. */
typedef enum fs_status {
  FS_OK = 0,
  FS_E_USAGE = 1,    /* bad arguments, unknown options, invalid config */
  FS_E_DATA = 2,     /* unreadable or inconsistent input data */
  FS_E_INTERNAL = 3
} fs_status;

FS_API const char *fs_version(void);
FS_API const char *fs_last_error(void);

/* Silences library diagnostics on stderr when |enabled| is 0. */
FS_API void fs_set_logging(int enabled);

/* ---- commands ---------------------------------------------------------- */

typedef struct fs_config fs_config;

FS_API fs_status fs_config_new(fs_config **out);
FS_API void fs_config_free(fs_config *cfg);
FS_API fs_status fs_config_set(fs_config *cfg, const char *key,
                               const char *value);

FS_API int fs_command_count(void);
FS_API const char *fs_command_name(int index);
FS_API const char *fs_command_help(int index);
/* Name of the key filled by a positional argument, or "" if none. */
FS_API const char *fs_command_positional(int index);
FS_API int fs_command_key_count(int index);
FS_API fs_status fs_command_key(int index, int key, const char **name,
                                const char **default_value, int *required,
                                const char **help);

/* Fingerprint of the resolved configuration without running anything. */
FS_API fs_status fs_fingerprint(const char *command, const fs_config *cfg,
                                uint64_t *fingerprint);
/* Runs a command; results not sent to an --out file go to stdout. */
FS_API fs_status fs_run(const char *command, const fs_config *cfg,
                        uint64_t *fingerprint);

/* ---- lattice primitives ------------------------------------------------ */

/* Row-major double matrix. */
typedef struct fs_matrix fs_matrix;

FS_API fs_status fs_matrix_new(size_t rows, size_t cols, fs_matrix **out);
FS_API void fs_matrix_free(fs_matrix *m);
FS_API size_t fs_matrix_rows(const fs_matrix *m);
FS_API size_t fs_matrix_cols(const fs_matrix *m);
FS_API double *fs_matrix_data(fs_matrix *m);
FS_API const double *fs_matrix_const_data(const fs_matrix *m);

typedef enum fs_topology { FS_TOPOLOGY_CTC = 0, FS_TOPOLOGY_HMM = 1 } fs_topology;

/* Alignment automaton over |n| emission labels.  |reserved| is the blank
 * label for CTC and the silence label for HMM (negative: no silence). */
typedef struct fs_fsa fs_fsa;

FS_API fs_status fs_fsa_new(fs_topology topology, const int *labels, size_t n,
                            int reserved, int min_duration, fs_fsa **out);
FS_API void fs_fsa_free(fs_fsa *fsa);
FS_API int fs_fsa_num_states(const fs_fsa *fsa);
FS_API int fs_fsa_min_frames(const fs_fsa *fsa);

/* log scores are T x L; every result is in natural-log units. */
FS_API fs_status fs_forward_score(const fs_fsa *fsa, const fs_matrix *scores,
                                  double *log_total);
/* |occupation| receives a new T x L matrix. */
FS_API fs_status fs_occupation(const fs_fsa *fsa, const fs_matrix *scores,
                               fs_matrix **occupation);
/* |labels_out| must hold T entries. */
FS_API fs_status fs_viterbi(const fs_fsa *fsa, const fs_matrix *scores,
                            int *labels_out, double *score);
/* Max-pools windows of |factor| frames into a new matrix. */
FS_API fs_status fs_subsample(const fs_matrix *scores, int factor,
                              fs_matrix **out);

typedef enum fs_variant {
  FS_VARIANT_CTC = 0,
  FS_VARIANT_P_HMM = 1,
  FS_VARIANT_P_HMM_S = 2,
  FS_VARIANT_H_HMM = 3
} fs_variant;

typedef struct fs_model_spec {
  fs_variant variant;
  double alpha, beta, gamma;
  /* speech-loop, speech-forward, silence-loop, silence-forward; NULL if
   * unused. */
  const double *transitions;
  const double *prior; /* L probabilities or NULL */
  size_t prior_size;
} fs_model_spec;

/* Loss over log-softmax posteriors; |gradient| (optional) receives a new
 * T x L matrix with d loss / d logits. */
FS_API fs_status fs_loss(const fs_model_spec *spec, const fs_fsa *fsa,
                         const fs_matrix *log_posteriors, double *loss,
                         fs_matrix **gradient);

#ifdef __cplusplus
}
#endif

#endif /* FULLSUM_FULLSUM_H_ */
