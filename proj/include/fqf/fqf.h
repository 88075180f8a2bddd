// Copyright 2026 The fqf Authors
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

#ifndef FQF_FQF_H
#define FQF_FQF_H

/*
 * C interface to the fqf library: parity-graded open-system models, master
 * equation integration, electron-counting record synthesis, the counting
 * filter and the classical Kalman / grid baselines.
 *
 * Objects are opaque handles created by fqf_* functions and released with the
 * matching *_free function (free functions accept NULL). Every fallible call
 * returns an fqf_status; on failure fqf_last_error_message() describes the
 * problem for the calling thread and fqf_last_error_step() names the
 * integration step when one applies.
 *
 * Complex matrices cross the boundary as row-major arrays of interleaved
 * (re, im) doubles, 2 * dim * dim values long. Output buffers shorter than
 * the documented length are rejected with FQF_ERR_INVALID_ARGUMENT.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(FQF_BUILDING_LIBRARY)
#define FQF_API __attribute__((visibility("default")))
#else
#define FQF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fqf_status {
  FQF_OK = 0,
  FQF_ERR_INVALID_ARGUMENT = 1,
  FQF_ERR_DIMENSION_MISMATCH = 2,
  FQF_ERR_MIXED_PARITY = 3,
  FQF_ERR_INDEX_OUT_OF_RANGE = 4,
  FQF_ERR_INVALID_PARITY_ASSIGNMENT = 5,
  FQF_ERR_INVALID_MODEL = 6,
  FQF_ERR_GRID_MISMATCH = 7,
  FQF_ERR_DEGENERATE_RATIO = 8,
  FQF_ERR_INVARIANT_VIOLATION = 9,
  FQF_ERR_NON_UNIQUE_STEADY_STATE = 10,
  FQF_ERR_BOUNDARY_MASS_LEAK = 11,
  FQF_ERR_IO = 12,
  FQF_ERR_PARSE = 13,
  FQF_ERR_INTERNAL = 99
} fqf_status;

typedef enum fqf_parity { FQF_PARITY_EVEN = 0, FQF_PARITY_ODD = 1, FQF_PARITY_MIXED = 2 } fqf_parity;

typedef struct fqf_model fqf_model;
typedef struct fqf_state fqf_state;
typedef struct fqf_record fqf_record;          /* counting record, dY in {0,1} */
typedef struct fqf_obs_record fqf_obs_record;  /* real-valued observation record */
typedef struct fqf_trajectory fqf_trajectory;  /* time series of density matrices */
typedef struct fqf_table fqf_table;            /* named columns of doubles */

FQF_API const char* fqf_version(void);
FQF_API const char* fqf_status_string(fqf_status status);
FQF_API const char* fqf_last_error_message(void);
/* Step index attached to the last error, or -1. */
FQF_API long long fqf_last_error_step(void);

/* ---- models ------------------------------------------------------------ */

/* Presets: "dot" (gamma_L, gamma_R) and "photodetector" (kappa, gamma,
 * gamma0, gamma1). Parameters not supplied default to 0. */
FQF_API fqf_status fqf_model_preset(const char* name, const char* const* param_names,
                                    const double* param_values, size_t n_params,
                                    fqf_model** out);

/* Model from explicit matrices. factor_dims has n_factors entries;
 * parity_signs concatenates the theta diagonals of all factors (+1/-1).
 * Any of H, L, L0, L1 may be NULL (zero); S and S0 may be NULL (identity). */
FQF_API fqf_status fqf_model_custom(size_t n_factors, const size_t* factor_dims,
                                    const int* parity_signs, const double* H, const double* S,
                                    const double* L, const double* S0, const double* L0,
                                    const double* L1, fqf_model** out);

FQF_API void fqf_model_free(fqf_model* model);
FQF_API size_t fqf_model_dim(const fqf_model* model);
FQF_API int fqf_model_is_valid(const fqf_model* model);
FQF_API int fqf_model_filtering_available(const fqf_model* model);
/* Copies a NUL-terminated summary; *needed receives the full length + 1. */
FQF_API fqf_status fqf_model_validation_summary(const fqf_model* model, char* buffer, size_t len,
                                                size_t* needed);
FQF_API size_t fqf_model_observable_count(const fqf_model* model);
/* Name of the i-th catalog observable (sorted), NULL when out of range. */
FQF_API const char* fqf_model_observable_name(const fqf_model* model, size_t index);
FQF_API fqf_status fqf_model_observable_parity(const fqf_model* model, const char* name,
                                               fqf_parity* out);
FQF_API fqf_status fqf_model_observable_is_hermitian(const fqf_model* model, const char* name,
                                                     int* out);

/* ---- states ------------------------------------------------------------ */

/* spec: "mixed", "basis:<i>", "diag:p0,p1,...", "steady", or a preset alias
 * ("empty", "occupied" for the dot; "excited", "ground" for the
 * photodetector, both with the detector in |1>). */
FQF_API fqf_status fqf_state_preset(const fqf_model* model, const char* spec, fqf_state** out);
FQF_API fqf_status fqf_state_from_matrix(const fqf_model* model, const double* rho,
                                         fqf_state** out);
FQF_API void fqf_state_free(fqf_state* state);
FQF_API fqf_status fqf_state_matrix(const fqf_state* state, double* out, size_t len);
FQF_API fqf_status fqf_state_expectation(const fqf_model* model, const fqf_state* state,
                                         const char* observable, double* re, double* im);
FQF_API fqf_status fqf_steady_state(const fqf_model* model, fqf_state** out);

/* ---- evolution and filtering -------------------------------------------- */

typedef struct fqf_run_diagnostics {
  double max_hermiticity;
  double max_trace_error;
  double min_eigenvalue;
  double max_evenness;
  size_t jumps;
} fqf_run_diagnostics;

/* Master equation, classical RK4, keeping every stride-th state. */
FQF_API fqf_status fqf_evolve_master(const fqf_model* model, const fqf_state* rho0, double T,
                                     double dt, size_t stride, fqf_trajectory** out);

/* Quantum-jump record synthesis keyed by (seed, trajectory_id, step). Either
 * output pointer may be NULL. */
FQF_API fqf_status fqf_simulate(const fqf_model* model, const fqf_state* rho0, double T, double dt,
                                uint64_t seed, uint64_t trajectory_id, size_t stride,
                                fqf_record** record_out, fqf_trajectory** trajectory_out);

FQF_API fqf_status fqf_filter(const fqf_model* model, const fqf_state* rho0_hat,
                              const fqf_record* record, size_t stride, fqf_trajectory** out);

FQF_API void fqf_trajectory_free(fqf_trajectory* trajectory);
/* Number of stored states. */
FQF_API size_t fqf_trajectory_length(const fqf_trajectory* trajectory);
FQF_API double fqf_trajectory_time(const fqf_trajectory* trajectory, size_t index);
FQF_API size_t fqf_trajectory_step_index(const fqf_trajectory* trajectory, size_t index);
FQF_API fqf_status fqf_trajectory_expectation(const fqf_model* model,
                                              const fqf_trajectory* trajectory, size_t index,
                                              const char* observable, double* re, double* im);
FQF_API fqf_status fqf_trajectory_state(const fqf_trajectory* trajectory, size_t index,
                                        fqf_state** out);
/* Per-step intensities and innovations (filter/simulate only; 0 for master). */
FQF_API size_t fqf_trajectory_steps(const fqf_trajectory* trajectory);
FQF_API double fqf_trajectory_intensity(const fqf_trajectory* trajectory, size_t step);
FQF_API double fqf_trajectory_innovation(const fqf_trajectory* trajectory, size_t step);
FQF_API fqf_status fqf_trajectory_diagnostics(const fqf_trajectory* trajectory,
                                              fqf_run_diagnostics* out);

/* Tabulates stored states: columns t,<obs...>, or with filter_columns != 0
 * step,t,intensity,dW,<obs...> restricted to states that start a step.
 * Non-Hermitian observables expand to <name>_re,<name>_im. */
FQF_API fqf_status fqf_trajectory_table(const fqf_model* model, const fqf_trajectory* trajectory,
                                        const char* const* observables, size_t n_observables,
                                        int filter_columns, fqf_table** out);

/* ---- records ------------------------------------------------------------ */

FQF_API fqf_status fqf_record_create(double t0, double dt, const uint8_t* increments, size_t n,
                                     uint64_t seed, uint64_t trajectory_id, fqf_record** out);
FQF_API fqf_status fqf_record_read_csv(const char* path, double dt_hint, fqf_record** out);
FQF_API fqf_status fqf_record_write_csv(const fqf_record* record, const char* path);
FQF_API void fqf_record_free(fqf_record* record);
FQF_API size_t fqf_record_length(const fqf_record* record);
FQF_API double fqf_record_t0(const fqf_record* record);
FQF_API double fqf_record_dt(const fqf_record* record);
FQF_API uint64_t fqf_record_seed(const fqf_record* record);
FQF_API size_t fqf_record_count_total(const fqf_record* record);
FQF_API fqf_status fqf_record_increments(const fqf_record* record, uint8_t* out, size_t len);

/* ---- closed scalar filters ------------------------------------------------ */

/* n_out receives length(record) + 1 values. */
FQF_API fqf_status fqf_dot_scalar_filter(const fqf_record* record, double gamma_L, double gamma_R,
                                         double n0, double* n_out, size_t len,
                                         size_t* excursions);

typedef enum fqf_detector_form { FQF_DETECTOR_DERIVED = 0, FQF_DETECTOR_AS_PRINTED = 1 } fqf_detector_form;

/* params = {kappa, gamma, gamma0, gamma1}; moments are laid out as
 * {n, s22, s12p_re, s12p_im, s11pm, s22pm, s33pm}; out receives
 * 7 * (length(record) + 1) values. */
FQF_API fqf_status fqf_photodetector_scalar_filter(const fqf_record* record, const double* params,
                                                   const double* initial, fqf_detector_form form,
                                                   double* out, size_t len);
FQF_API fqf_status fqf_photodetector_moments(const fqf_model* photodetector, const fqf_state* state,
                                             double* out7);

/* ---- ensembles ------------------------------------------------------------ */

typedef struct fqf_ensemble_config {
  size_t trajectories;
  uint64_t seed;
  double T;
  double dt;
  unsigned workers; /* 0: hardware concurrency */
} fqf_ensemble_config;

typedef struct fqf_ensemble_summary {
  double innovation_mean;
  double innovation_std;
  size_t total_jumps;
  fqf_run_diagnostics worst;
  double max_odd_expectation;
} fqf_ensemble_summary;

/* Table columns: t, then <obs>_mean,<obs>_se,<obs>_master per observable. */
FQF_API fqf_status fqf_ensemble(const fqf_model* model, const fqf_state* rho0,
                                const fqf_ensemble_config* config,
                                const char* const* observables, size_t n_observables,
                                const double* sample_times, size_t n_samples, fqf_table** out,
                                fqf_ensemble_summary* summary);

/* ---- classical baselines ------------------------------------------------- */

typedef struct fqf_linear_model {
  double a;
  double c;
  double xi0_mean;
  double xi0_var;
  int process_noise;
} fqf_linear_model;

/* path_out gets columns t,xi. Either output may be NULL. */
FQF_API fqf_status fqf_linear_simulate(const fqf_linear_model* model, double T, double dt,
                                       uint64_t seed, fqf_obs_record** record_out,
                                       fqf_table** path_out);
FQF_API fqf_status fqf_obs_record_read_csv(const char* path, double dt_hint, fqf_obs_record** out);
FQF_API fqf_status fqf_obs_record_write_csv(const fqf_obs_record* record, const char* path);
FQF_API void fqf_obs_record_free(fqf_obs_record* record);
FQF_API size_t fqf_obs_record_length(const fqf_obs_record* record);
FQF_API double fqf_obs_record_dt(const fqf_obs_record* record);

/* Columns t,xi_hat,Sigma. */
FQF_API fqf_status fqf_kalman(const fqf_linear_model* model, const fqf_obs_record* record,
                              fqf_table** out);
FQF_API fqf_status fqf_kalman_stationary_variance(double a, double c, double* out);

typedef double (*fqf_scalar_fn)(double x, void* user);

typedef struct fqf_grid_spec {
  double x_min;
  double x_max;
  size_t nx;
  double init_mean;
  double init_var;
} fqf_grid_spec;

/* Kushner-Stratonovich grid filter. summary_out: t,mean,variance.
 * snapshots_out (may be NULL): column x, then one column "p@<t>" per
 * snapshot time. */
FQF_API fqf_status fqf_ksgrid(fqf_scalar_fn g, void* g_user, fqf_scalar_fn h, void* h_user,
                              const fqf_obs_record* record, const fqf_grid_spec* grid,
                              const double* snapshot_times, size_t n_snapshots,
                              fqf_table** summary_out, fqf_table** snapshots_out);

/* ---- tables --------------------------------------------------------------- */

FQF_API void fqf_table_free(fqf_table* table);
FQF_API size_t fqf_table_columns(const fqf_table* table);
FQF_API size_t fqf_table_rows(const fqf_table* table);
FQF_API const char* fqf_table_column_name(const fqf_table* table, size_t column);
FQF_API double fqf_table_value(const fqf_table* table, size_t row, size_t column);
FQF_API fqf_status fqf_table_write_csv(const fqf_table* table, const char* path);
FQF_API fqf_status fqf_table_read_csv(const char* path, fqf_table** out);

#ifdef __cplusplus
}
#endif

#endif /* FQF_FQF_H */
