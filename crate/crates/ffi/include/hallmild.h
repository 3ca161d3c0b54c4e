#ifndef HALLMILD_H
#define HALLMILD_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define HM_VERDICT_CONVERGED 0

#define HM_VERDICT_DIVERGED 1

#define HM_VERDICT_MAX_ITER 2

#define HM_FAMILY_TAYLOR_GREEN 0

#define HM_FAMILY_RANDOM_BAND 1

#define HM_FAMILY_CONCENTRATED_BUMP 2

#define HM_SCHEME_EULER 0

#define HM_SCHEME_AB2 1

// Solver parameters.
typedef struct HmConfig HmConfig;

// A solenoidal, mean-free initial pair `(u0, b0)`.
typedef struct HmData HmData;

// Outcome of a Picard run.
typedef struct HmRun HmRun;

typedef int32_t HmStatus;

// One row of the iteration trace. `rho` is NaN where no ratio was recorded.
typedef struct HmTraceRow {
  size_t m;
  double u_crit;
  double b_crit;
  double b_lip;
  double u_alpha;
  double b_alpha;
  double du_crit;
  double db_crit;
  double db_lip;
  double triple;
  double rho;
  double max_divergence;
} HmTraceRow;

#define HM_OK 0

// A required pointer argument was null.
#define HM_ERR_NULL 1

#define HM_ERR_INVALID_ARG 2

#define HM_ERR_IO 3

// Malformed configuration text or field file.
#define HM_ERR_FORMAT 4

// Non-finite values, a stability guard or an unreached tolerance.
#define HM_ERR_NUMERIC 5

// A Rust panic was caught at the boundary.
#define HM_ERR_PANIC 6

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *hm_last_error(void);

// Library version as a static NUL-terminated string.
const char *hm_version(void);

// Default solver parameters.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
HmStatus hm_config_new(struct HmConfig **out);

// Solver parameters from TOML text in the command-line config format.
//
// # Safety
// `toml` must be a NUL-terminated string; `out` as for `hm_config_new`.
HmStatus hm_config_from_toml(const char *toml, struct HmConfig **out);

// Sets one parameter by name (`p`, `q`, `alpha`, `n`, `box_length`,
// `t_final`, `n_t`, `quad_order`, `ext_order`, `max_iterations`, `tol`,
// `ceiling_factor`, `hall`). Integer keys need an integral value. The
// whole configuration is validated; on failure it is left unchanged.
//
// # Safety
// `cfg` must be a live handle and `key` a NUL-terminated string.
HmStatus hm_config_set(struct HmConfig *cfg, const char *key, double value);

// Reads one parameter by name (see `hm_config_set`).
//
// # Safety
// `cfg` must be a live handle, `key` a NUL-terminated string and `value` writable.
HmStatus hm_config_get(const struct HmConfig *cfg, const char *key, double *value);

// Number of doubles in one physical vector field, `3 n³`.
//
// # Safety
// `cfg` must be a live handle and `len` writable.
HmStatus hm_config_field_len(const struct HmConfig *cfg, size_t *len);

// # Safety
// `cfg` must be null or a handle from this library not yet freed.
void hm_config_free(struct HmConfig *cfg);

// Generated initial data (`HM_FAMILY_*`) with `max|u0| = max|b0| = amplitude`.
//
// # Safety
// `cfg` must be a live handle; `out` writable.
HmStatus hm_data_generate(const struct HmConfig *cfg,
                          int32_t family,
                          double amplitude,
                          uint64_t seed,
                          struct HmData **out);

// Initial data from physical samples of `u0` and `b0`, each `len = 3 n³`
// doubles. Both fields must be divergence free and mean free to round-off.
//
// # Safety
// `u0` and `b0` must point to `len` readable doubles; `cfg` live; `out` writable.
HmStatus hm_data_from_physical(const struct HmConfig *cfg,
                               const double *u0,
                               const double *b0,
                               size_t len,
                               struct HmData **out);

// # Safety
// `data` must be null or a handle from this library not yet freed.
void hm_data_free(struct HmData *data);

// Picard iteration. A diverged or capped run is still `HM_OK`; inspect
// `hm_run_verdict`.
//
// # Safety
// `cfg` and `data` must be live handles; `out` writable.
HmStatus hm_run(const struct HmConfig *cfg, const struct HmData *data, struct HmRun **out);

// `HM_VERDICT_*` of the run.
//
// # Safety
// `r` must be a live handle and `verdict` writable.
HmStatus hm_run_verdict(const struct HmRun *r, int32_t *verdict);

// Trace length.
//
// # Safety
// `r` must be a live handle and `count` writable.
HmStatus hm_run_iterations(const struct HmRun *r, size_t *count);

// Geometric mean of the contraction ratios; NaN when none were recorded.
//
// # Safety
// `r` must be a live handle and `rho_bar` writable.
HmStatus hm_run_rho_bar(const struct HmRun *r, double *rho_bar);

// Trace row `index` (0-based).
//
// # Safety
// `r` must be a live handle and `row` writable.
HmStatus hm_run_trace_row(const struct HmRun *r, size_t index, struct HmTraceRow *row);

// Physical samples of the last iterate at `t = T` into `u` and `b`, each
// with room for `len = 3 n³` doubles.
//
// # Safety
// `u` and `b` must point to `len` writable doubles; `r` must be live.
HmStatus hm_run_final_fields(const struct HmRun *r, double *u, double *b, size_t len);

// # Safety
// `r` must be null or a handle from this library not yet freed.
void hm_run_free(struct HmRun *r);

// Strong-form reference solution at `t = T` by exponential time stepping
// (`HM_SCHEME_*`) with step `dt`, which must divide `T`. The Hall
// coefficient and horizon come from `cfg`.
//
// # Safety
// `u` and `b` must point to `len` writable doubles; handles must be live.
HmStatus hm_reference(const struct HmConfig *cfg,
                      const struct HmData *data,
                      double dt,
                      int32_t scheme,
                      double *u,
                      double *b,
                      size_t len);

// Spatial Besov norm `‖f‖_{B^s_{p,q}}` of a physical field with `ncomp`
// components on the `n³` grid of side `box_length`. `p` or `q` may be
// `INFINITY`.
//
// # Safety
// `values` must point to `ncomp n³` readable doubles and `norm` be writable.
HmStatus hm_besov_norm(size_t n,
                       double box_length,
                       size_t ncomp,
                       const double *values,
                       double s,
                       double p,
                       double q,
                       double *norm);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HALLMILD_H */
