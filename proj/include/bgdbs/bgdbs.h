/*
 * Copyright 2026 The bgdbs Authors
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

/*
 * C interface to the basal-ganglia DBS simulator and TD3 controller.
 *
 * Every function returns a bgdbs_status. On failure the calling thread's
 * bgdbs_last_error() holds a message until its next failing call. Handles
 * are opaque and released with the matching *_free function; passing NULL
 * to *_free is a no-op.
 *
 * Text and byte outputs use the (buf, cap, needed) convention: *needed
 * receives the full size (excluding the terminating NUL for text). When buf
 * is NULL or cap is too small nothing is written and
 * BGDBS_E_BUFFER_TOO_SMALL is returned.
 *
 * The library performs no file I/O; callers pass file contents in.
 */
#ifndef BGDBS_BGDBS_H_
#define BGDBS_BGDBS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BGDBS_API __declspec(dllexport)
#else
#define BGDBS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bgdbs_status {
  BGDBS_OK = 0,
  BGDBS_E_INVALID_ARGUMENT = 1,
  BGDBS_E_CONFIG = 2,
  BGDBS_E_IO = 3,
  BGDBS_E_DIVERGENCE = 4,
  BGDBS_E_PULSE_OVERLAP = 5,
  BGDBS_E_WINDOW_TOO_SHORT = 6,
  BGDBS_E_BAND_OUT_OF_RANGE = 7,
  BGDBS_E_DEGENERATE_SIGNAL = 8,
  BGDBS_E_DEGENERATE_RANGE = 9,
  BGDBS_E_EPISODE_FINISHED = 10,
  BGDBS_E_NAN_GRADIENT = 11,
  BGDBS_E_VERSION_MISMATCH = 12,
  BGDBS_E_CORRUPT_CHECKPOINT = 13,
  BGDBS_E_BUFFER_TOO_SMALL = 14,
  BGDBS_E_INTERNAL = 99
} bgdbs_status;

enum { BGDBS_FEATURES = 6, BGDBS_ACTIONS = 2 };

typedef enum bgdbs_condition { BGDBS_HEALTHY = 0, BGDBS_PARKINSONIAN = 1 } bgdbs_condition;
typedef enum bgdbs_baseline {
  BGDBS_BASELINE_HEALTHY = 0,
  BGDBS_BASELINE_PD = 1,
  BGDBS_BASELINE_ODBS = 2
} bgdbs_baseline;

typedef struct bgdbs_model bgdbs_model;
typedef struct bgdbs_calibration bgdbs_calibration;
typedef struct bgdbs_env bgdbs_env;
typedef struct bgdbs_agent bgdbs_agent;
typedef struct bgdbs_training bgdbs_training;
typedef struct bgdbs_report bgdbs_report;

BGDBS_API const char* bgdbs_version(void);
BGDBS_API const char* bgdbs_last_error(void);
BGDBS_API const char* bgdbs_status_name(bgdbs_status status);
BGDBS_API const char* bgdbs_feature_name(int index);

/* ------------------------------------------------------------ model */

/* Parses the YAML parameter schema (see params/bgt_model.yaml). */
BGDBS_API bgdbs_status bgdbs_model_parse(const char* yaml, size_t len, bgdbs_model** out);
BGDBS_API void bgdbs_model_free(bgdbs_model* model);

/* ------------------------------------------------------------ stimulus */

/* Closed-form RMS of a biphasic train, A * sqrt(f * 0.3 ms). */
BGDBS_API double bgdbs_ideal_rms(double frequency_hz, double amplitude);
/* RMS of the sampled train over one window. */
BGDBS_API bgdbs_status bgdbs_stim_rms(double frequency_hz, double amplitude, double duration_ms,
                                      double dt_ms, double* out);
/* Writes the sampled electrode current (uA/cm^2). */
BGDBS_API bgdbs_status bgdbs_stim_synthesize(double frequency_hz, double amplitude,
                                             double duration_ms, double dt_ms, double* buf,
                                             size_t cap, size_t* needed);

/* ------------------------------------------------------------ environment */

typedef struct bgdbs_env_options {
  double timestep_ms;  /* 100 */
  int episode_len;     /* 10 */
  double theta;        /* 0.85 */
  double epsilon;      /* 0.68 */
  double settle_ms;    /* 200 */
  uint64_t seed;       /* 0 */
} bgdbs_env_options;

BGDBS_API void bgdbs_env_options_default(bgdbs_env_options* out);

/* Healthy and Parkinsonian stimulus-free episodes. */
BGDBS_API bgdbs_status bgdbs_calibrate(const bgdbs_model* model, const bgdbs_env_options* options,
                                       int episodes, uint64_t seed, bgdbs_calibration** out);
BGDBS_API bgdbs_status bgdbs_calibration_parse(const char* json, size_t len,
                                               bgdbs_calibration** out);
BGDBS_API bgdbs_status bgdbs_calibration_json(const bgdbs_calibration* cal, char* buf, size_t cap,
                                              size_t* needed);
BGDBS_API bgdbs_status bgdbs_calibration_id(const bgdbs_calibration* cal, char* buf, size_t cap,
                                            size_t* needed);
BGDBS_API bgdbs_status bgdbs_calibration_r1(const bgdbs_calibration* cal, double* r1_min,
                                            double* r1_max);
BGDBS_API void bgdbs_calibration_free(bgdbs_calibration* cal);

typedef struct bgdbs_step_result {
  double observation[BGDBS_FEATURES];
  double reward;
  int done;
  int timestep;
  double r1_raw;
  double r1;
  double r2;
  double features[BGDBS_FEATURES];
  double frequency_hz;
  double amplitude;
  double rms;
  int clamped;
  int diverged;
} bgdbs_step_result;

BGDBS_API bgdbs_status bgdbs_env_create(const bgdbs_model* model, const bgdbs_calibration* cal,
                                        const bgdbs_env_options* options,
                                        bgdbs_condition condition, bgdbs_env** out);
BGDBS_API bgdbs_status bgdbs_env_reset(bgdbs_env* env, uint64_t seed,
                                       double observation[BGDBS_FEATURES]);
BGDBS_API bgdbs_status bgdbs_env_step(bgdbs_env* env, double a0, double a1,
                                      bgdbs_step_result* out);
/* JSON line of the most recent step. */
BGDBS_API bgdbs_status bgdbs_env_last_step_json(const bgdbs_env* env, char* buf, size_t cap,
                                                size_t* needed);
BGDBS_API void bgdbs_env_free(bgdbs_env* env);

/* ------------------------------------------------------------ agent */

typedef struct bgdbs_agent_options {
  double gamma;
  double tau;
  int policy_delay;
  double target_noise_sigma;
  double target_noise_clip;
  double exploration_sigma;
  int batch_size;
  size_t buffer_capacity;
  double actor_lr;
  double critic_lr;
  int warmup_steps;
  int hidden[2];
} bgdbs_agent_options;

BGDBS_API void bgdbs_agent_options_default(bgdbs_agent_options* out);

/* Deterministic policy output in [-1, 1]^2. */
BGDBS_API bgdbs_status bgdbs_agent_act(const bgdbs_agent* agent,
                                       const double observation[BGDBS_FEATURES],
                                       double action[BGDBS_ACTIONS]);
/* Serializes the agent tagged with the calibration id and a config hash. */
BGDBS_API bgdbs_status bgdbs_agent_save(const bgdbs_agent* agent, const bgdbs_calibration* cal,
                                        uint64_t config_hash, uint8_t* buf, size_t cap,
                                        size_t* needed);
BGDBS_API bgdbs_status bgdbs_agent_load(const uint8_t* bytes, size_t len, bgdbs_agent** out);
/* Calibration id recorded in a loaded checkpoint (empty for fresh agents). */
BGDBS_API bgdbs_status bgdbs_agent_norm_id(const bgdbs_agent* agent, char* buf, size_t cap,
                                           size_t* needed);
BGDBS_API void bgdbs_agent_free(bgdbs_agent* agent);

/* ------------------------------------------------------------ training */

typedef struct bgdbs_train_options {
  int max_steps;        /* 5000 */
  int ma_window;        /* 20 */
  int patience;         /* 50 */
  double tolerance;     /* 0.01 */
  int validation_episodes; /* 5 */
} bgdbs_train_options;

typedef struct bgdbs_episode_record {
  int episode;
  int steps;
  double episode_return;
  double moving_average;
} bgdbs_episode_record;

typedef void (*bgdbs_progress_fn)(void* user, size_t run, const bgdbs_episode_record* record);

BGDBS_API void bgdbs_train_options_default(bgdbs_train_options* out);

/* Trains one agent per seed on Parkinsonian parameters. On
 * BGDBS_E_NAN_GRADIENT the progress callback has already seen every
 * completed episode. */
BGDBS_API bgdbs_status bgdbs_train(const bgdbs_model* model, const bgdbs_calibration* cal,
                                   const bgdbs_env_options* env_options,
                                   const bgdbs_agent_options* agent_options,
                                   const bgdbs_train_options* train_options, const uint64_t* seeds,
                                   size_t n_seeds, bgdbs_progress_fn progress, void* user,
                                   bgdbs_training** out);
BGDBS_API size_t bgdbs_training_runs(const bgdbs_training* t);
/* Index of the run with the best validation return. */
BGDBS_API size_t bgdbs_training_best(const bgdbs_training* t);
BGDBS_API bgdbs_status bgdbs_training_run_info(const bgdbs_training* t, size_t run,
                                               double* validation_return, int* steps,
                                               int* early_stopped);
BGDBS_API bgdbs_status bgdbs_training_curve_csv(const bgdbs_training* t, size_t run, char* buf,
                                                size_t cap, size_t* needed);
/* New agent handle copied from a run. */
BGDBS_API bgdbs_status bgdbs_training_agent(const bgdbs_training* t, size_t run,
                                            bgdbs_agent** out);
BGDBS_API void bgdbs_training_free(bgdbs_training* t);

/* ------------------------------------------------------------ reports */

typedef struct bgdbs_stat {
  double mean;
  double sd;
  size_t count;
} bgdbs_stat;

typedef struct bgdbs_report_summary {
  bgdbs_stat sgi_power;
  bgdbs_stat vgi_beta;
  bgdbs_stat rms;
  bgdbs_stat frequency;
  bgdbs_stat amplitude;
  bgdbs_stat episode_return;
} bgdbs_report_summary;

/* frequency_hz / amplitude are used by BGDBS_BASELINE_ODBS only. */
BGDBS_API bgdbs_status bgdbs_run_baseline(const bgdbs_model* model, const bgdbs_calibration* cal,
                                          const bgdbs_env_options* options, bgdbs_baseline which,
                                          int episodes, uint64_t seed, double frequency_hz,
                                          double amplitude, bgdbs_report** out);
/* BGDBS_E_VERSION_MISMATCH when the agent was saved against another
 * calibration. */
BGDBS_API bgdbs_status bgdbs_evaluate(const bgdbs_agent* agent, const bgdbs_model* model,
                                      const bgdbs_calibration* cal,
                                      const bgdbs_env_options* options, int episodes,
                                      uint64_t seed, bgdbs_report** out);
BGDBS_API bgdbs_status bgdbs_report_summary_get(const bgdbs_report* report,
                                                bgdbs_report_summary* out);
BGDBS_API bgdbs_status bgdbs_report_set_config_hash(bgdbs_report* report, const char* hash);
BGDBS_API bgdbs_status bgdbs_reports_csv(const bgdbs_report* const* reports, size_t n, char* buf,
                                         size_t cap, size_t* needed);
BGDBS_API bgdbs_status bgdbs_reports_table(const bgdbs_report* const* reports, size_t n,
                                           char* buf, size_t cap, size_t* needed);
BGDBS_API void bgdbs_report_free(bgdbs_report* report);

/* Independent seed for `stream` derived from a master seed. */
BGDBS_API uint64_t bgdbs_derive_seed(uint64_t master, uint64_t stream);

/* crc32 of the bytes as 8 lowercase hex digits plus NUL. */
BGDBS_API void bgdbs_content_hash(const void* bytes, size_t len, char out[9]);

#ifdef __cplusplus
}
#endif

#endif /* BGDBS_BGDBS_H_ */
