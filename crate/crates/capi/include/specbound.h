#ifndef SPECBOUND_H
#define SPECBOUND_H

/* Generated by cbindgen from specbound-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes: 0 success, 2 invalid input, 3 solver failure.
 */
typedef enum sb_status {
  SB_OK = 0,
  SB_ERR_VALIDATION = 2,
  SB_ERR_SOLVER = 3,
} sb_status;

/**
 * Spectral density evaluated on a uniform grid over [-pi, pi), plus the
 * coefficient vector that parameterizes it (denominator coefficients for
 * the rational estimate, Lagrange coefficients for maxent).
 */
typedef struct sb_density sb_density;

/**
 * Simulated sample path handle.
 */
typedef struct sb_series sb_series;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *sb_last_error_message(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by a `sb_*_json` function and
 * not yet freed.
 */
void sb_string_free(char *s);

/**
 * Rational estimate P/Q from a covariance window.
 *
 * `prior`/`prior_len` may be NULL/0 for the flat prior P = 1. Non-positive
 * `tolerance`/`max_iterations` select the defaults. Returns NULL on failure
 * (see [`sb_last_error_message`]).
 *
 * # Safety
 * `lags` must point to `lags_len` readable doubles; `prior`, when non-NULL,
 * to `prior_len` readable doubles.
 */
struct sb_density *sb_estimate(const double *lags,
                               size_t lags_len,
                               const double *prior,
                               size_t prior_len,
                               size_t grid_size,
                               double tolerance,
                               size_t max_iterations);

/**
 * Maximum-entropy density matching a covariance window; the coefficient
 * vector holds the Lagrange coefficients.
 *
 * # Safety
 * `lags` must point to `lags_len` readable doubles.
 */
struct sb_density *sb_maxent(const double *lags,
                             size_t lags_len,
                             size_t grid_size,
                             double tolerance,
                             size_t max_iterations);

/**
 * Number of grid values held by a density handle.
 *
 * # Safety
 * `density` must be a live handle from [`sb_estimate`] or [`sb_maxent`].
 */
size_t sb_density_len(const struct sb_density *density);

/**
 * Copies the density values into `out` (capacity `out_len`); returns the
 * number of values copied.
 *
 * # Safety
 * `density` must be a live handle; `out` must point to `out_len` writable
 * doubles.
 */
size_t sb_density_values(const struct sb_density *density, double *out, size_t out_len);

/**
 * Number of parameter coefficients held by a density handle.
 *
 * # Safety
 * `density` must be a live handle.
 */
size_t sb_density_coeffs_len(const struct sb_density *density);

/**
 * Copies the parameter coefficients into `out`; returns the number copied.
 *
 * # Safety
 * `density` must be a live handle; `out` must point to `out_len` writable
 * doubles.
 */
size_t sb_density_coeffs(const struct sb_density *density, double *out, size_t out_len);

/**
 * # Safety
 * `density` must come from this library and not be freed twice.
 */
void sb_density_free(struct sb_density *density);

/**
 * Simulates a stationary process described by a JSON model spec, e.g.
 * `{"kind":"ar","coeffs":[0.5],"innovation_variance":1.0}`.
 *
 * # Safety
 * `model_json` must be a NUL-terminated UTF-8 string.
 */
struct sb_series *sb_simulate(const char *model_json, size_t length, uint64_t seed);

/**
 * # Safety
 * `series` must be a live handle from [`sb_simulate`].
 */
size_t sb_series_len(const struct sb_series *series);

/**
 * Copies sample values into `out`; returns the number copied.
 *
 * # Safety
 * `series` must be a live handle; `out` must point to `out_len` writable
 * doubles.
 */
size_t sb_series_values(const struct sb_series *series, double *out, size_t out_len);

/**
 * # Safety
 * `series` must come from this library and not be freed twice.
 */
void sb_series_free(struct sb_series *series);

/**
 * Sample lag estimates from raw observations; writes `order + 1` doubles
 * into `out`.
 *
 * # Safety
 * `values` must point to `values_len` readable doubles and `out` to
 * `order + 1` writable doubles.
 */
enum sb_status sb_estimate_lags(const double *values, size_t values_len, size_t order, double *out);

/**
 * Entropy-difference-to-TV map B(kl) = 3*sqrt(-1 + sqrt(1 + 4*kl/9)).
 *
 * # Safety
 * `out` must point to a writable double.
 */
enum sb_status sb_tv_from_kl(double kl, double *out);

/**
 * Computes a bound report from a run-config JSON document with a `bounds`
 * block (same schema as the CLI config). Returns the report as a JSON
 * string to be freed with [`sb_string_free`], or NULL on failure.
 *
 * # Safety
 * `config_json` must be a NUL-terminated UTF-8 string.
 */
char *sb_bounds_json(const char *config_json);

/**
 * Runs a Monte Carlo validation scenario from a run-config JSON document
 * with a `validate` block; returns the validation report as JSON.
 *
 * # Safety
 * `config_json` must be a NUL-terminated UTF-8 string.
 */
char *sb_validate_json(const char *config_json, uint64_t seed);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SPECBOUND_H */
