#ifndef FUJITA_LAB_H
#define FUJITA_LAB_H

#pragma once

/* Generated by cbindgen. Do not edit. */

#include <stdbool.h>
#include <stddef.h>

typedef enum FlStatus {
  FL_STATUS_OK = 0,
  FL_STATUS_NULL_POINTER = 1,
  FL_STATUS_INVALID_UTF8 = 2,
  FL_STATUS_PARSE = 3,
  FL_STATUS_DOMAIN = 4,
  FL_STATUS_INVALID = 5,
  FL_STATUS_NUMERICAL = 6,
  FL_STATUS_IO = 7,
  FL_STATUS_PANIC = 8,
} FlStatus;

typedef enum FlRegime {
  FL_REGIME_BLOWUP = 0,
  FL_REGIME_GLOBAL_SMALL_DATA = 1,
  FL_REGIME_GAP = 2,
  FL_REGIME_INADMISSIBLE = 3,
} FlRegime;

typedef enum FlVerdict {
  FL_VERDICT_COMPLETED = 0,
  FL_VERDICT_BLOWUP_DETECTED = 1,
  FL_VERDICT_STEP_UNDERFLOW = 2,
} FlVerdict;

/**
 * A validated problem.
 */
typedef struct FlProblem FlProblem;

/**
 * A finished simulation.
 */
typedef struct FlTrajectory FlTrajectory;

/**
 * Closed-form exponents at one parameter point.
 */
typedef struct FlExponents {
  double delta;
  double threshold;
  double p_c;
  double ell;
  double window_lo;
  double window_hi;
  bool window_nonempty;
  bool blowup_holds;
  double certificate_exponent;
} FlExponents;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next
 * call into this library on the same thread.
 */
const char *fl_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void fl_string_free(char *s);

/**
 * Parses and checks a problem from JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum FlStatus fl_problem_from_json(const char *json, struct FlProblem **out);

/**
 * # Safety
 * `problem` must come from [`fl_problem_from_json`] and not have been freed.
 */
void fl_problem_free(struct FlProblem *problem);

/**
 * Full exponent report as JSON.
 *
 * # Safety
 * `problem` must be a live handle; `out` must be writable.
 */
enum FlStatus fl_problem_exponents_json(const struct FlProblem *problem, char **out);

/**
 * # Safety
 * `problem` must be a live handle; `out` must be writable.
 */
enum FlStatus fl_problem_classify(const struct FlProblem *problem, enum FlRegime *out);

/**
 * Scalar exponents at `(N, p, q, α, ϱ)`. Fails with a domain error where
 * a denominator is not positive.
 *
 * # Safety
 * `out` must be writable.
 */
enum FlStatus fl_exponents(size_t dim,
                           double p,
                           double q,
                           double alpha,
                           double rho,
                           struct FlExponents *out);

/**
 * Runs the time stepper. `config_json` is a solver configuration;
 * `geometry_json` may be null for the default grid of the problem dimension.
 *
 * # Safety
 * `problem` must be a live handle; string arguments NUL-terminated or null
 * where allowed; `out` writable.
 */
enum FlStatus fl_simulate(const struct FlProblem *problem,
                          const char *config_json,
                          const char *geometry_json,
                          struct FlTrajectory **out);

/**
 * # Safety
 * `traj` must come from [`fl_simulate`] and not have been freed.
 */
void fl_trajectory_free(struct FlTrajectory *traj);

/**
 * Number of samples.
 *
 * # Safety
 * `traj` must be a live handle; `out` writable.
 */
enum FlStatus fl_trajectory_len(const struct FlTrajectory *traj, size_t *out);

/**
 * Borrowed pointers to the sample columns, each of length
 * [`fl_trajectory_len`]. Any output pointer may be null. The arrays live as
 * long as the handle.
 *
 * # Safety
 * `traj` must be a live handle; non-null outputs writable.
 */
enum FlStatus fl_trajectory_columns(const struct FlTrajectory *traj,
                                    const double **times,
                                    const double **q_norms,
                                    const double **sup_norms);

/**
 * Verdict and blow-up time estimate; the estimate is NaN when absent.
 *
 * # Safety
 * `traj` must be a live handle; `verdict` writable; `blowup_time` writable or null.
 */
enum FlStatus fl_trajectory_verdict(const struct FlTrajectory *traj,
                                    enum FlVerdict *verdict,
                                    double *blowup_time);

/**
 * The whole record as JSON.
 *
 * # Safety
 * `traj` must be a live handle; `out` writable.
 */
enum FlStatus fl_trajectory_to_json(const struct FlTrajectory *traj, char **out);

/**
 * `E_a(z)` for `a ∈ (0, 1]`, `z ≥ 0`, with a bound on the omitted tail.
 *
 * # Safety
 * `value` writable; `remainder_bound` writable or null.
 */
enum FlStatus fl_mittag_leffler(double order,
                                double argument,
                                double *value,
                                double *remainder_bound);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUJITA_LAB_H */
