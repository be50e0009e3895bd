/* C interface to the reebflow library. */

#ifndef REEBFLOW_H
#define REEBFLOW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
enum ReebflowStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  REEBFLOW_STATUS_OK = 0,
  /**
   * Null pointer, bad length, non-finite number, malformed input.
   */
  REEBFLOW_STATUS_INVALID_ARGUMENT = 1,
  /**
   * The Reeb vector is outside the (open) Reeb cone.
   */
  REEBFLOW_STATUS_NOT_IN_CONE = 2,
  /**
   * Too close to the cone boundary for the requested operation.
   */
  REEBFLOW_STATUS_BOUNDARY_PROXIMITY = 3,
  /**
   * An iteration failed to converge or a quadrature node blew up.
   */
  REEBFLOW_STATUS_NUMERICAL_FAILURE = 4,
};
#ifndef __cplusplus
typedef int32_t ReebflowStatus;
#endif // __cplusplus

/**
 * Opaque quadrature context for the weighted sphere `S^{2n+1}`.
 */
typedef struct ReebflowLink ReebflowLink;

/**
 * Opaque solved soliton (profile plus attached metric data).
 */
typedef struct ReebflowSoliton ReebflowSoliton;

/**
 * Plain-struct volume report; the gradient is returned separately.
 */
typedef struct ReebflowVolumeReport {
  double volume;
  double relative_volume;
  double grad_norm;
  /**
   * min_i a_i, the distance proxy to the cone boundary.
   */
  double min_pairing;
} ReebflowVolumeReport;

/**
 * Headline numbers of a solved soliton profile.
 */
typedef struct ReebflowSolitonSummary {
  /**
   * Soliton potential slope: f(x) = b x + const.
   */
  double b;
  double x_max;
  double lambda;
  /**
   * Minimum transverse curvature over the grid.
   */
  double kt_min;
  /**
   * Sup-norm ODE residual over the grid.
   */
  double residual;
  /**
   * Link entropy of the soliton.
   */
  double mu;
} ReebflowSolitonSummary;

/**
 * Entropy report for one weight pair.
 */
typedef struct ReebflowEntropyReport {
  /**
   * Link volume at the slice-normalized weights.
   */
  double v;
  /**
   * W entropy of the soliton datum.
   */
  double w;
  /**
   * mu entropy (equals W at the soliton minimizer).
   */
  double mu;
  /**
   * Best-fit constant of the minimizer equation.
   */
  double a;
  /**
   * 1 iff V >= exp(mu/(4(n+1)) - 2n).
   */
  int32_t bound_ok;
} ReebflowEntropyReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread; empty string if none.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *reebflow_last_error_message(void);

/**
 * Create a link context. `points = 0` selects the per-dimension default
 * rule resolution and `mc_samples = 0` keeps the default sample count.
 * Returns null if `n` is outside `1..=3`.
 */
struct ReebflowLink *reebflow_link_new(uintptr_t n,
                                       uintptr_t points,
                                       uint64_t mc_samples,
                                       uint64_t mc_seed);

/**
 * Release a link context; null is accepted.
 *
 * # Safety
 * `link` must come from `reebflow_link_new` and not be freed twice.
 */
void reebflow_link_free(struct ReebflowLink *link);

/**
 * Volume report at the Reeb vector `reeb[0..len]` (`len = n + 1`).
 * If `grad_out` is non-null it receives the `len` slice-tangent gradient
 * components.
 *
 * # Safety
 * `reeb` must point to `len` doubles; `grad_out` must be null or point to
 * `len` writable doubles; `out` must be a valid pointer.
 */
ReebflowStatus reebflow_volume(const struct ReebflowLink *link,
                               const double *reeb,
                               uintptr_t len,
                               struct ReebflowVolumeReport *out,
                               double *grad_out);

/**
 * Futaki invariant at `reeb` against the tangent direction `y`
 * (components of `y` must sum to zero).
 *
 * # Safety
 * `reeb` and `y` must point to `len` doubles; `out` must be valid.
 */
ReebflowStatus reebflow_futaki(const struct ReebflowLink *link,
                               const double *reeb,
                               const double *y,
                               uintptr_t len,
                               double *out);

/**
 * Damped-Newton volume minimizer from `start` (normalized to the slice
 * first); writes the minimizing Reeb vector into `out[0..len]`.
 *
 * # Safety
 * `start` must point to `len` doubles and `out` to `len` writable doubles.
 */
ReebflowStatus reebflow_minimize(const struct ReebflowLink *link,
                                 const double *start,
                                 uintptr_t len,
                                 double *out);

/**
 * Integrate the volume-decreasing flow from `start`; writes the final
 * Reeb vector into `out_final[0..len]` and the number of recorded states
 * into `out_states` (both may be null if unwanted).
 *
 * # Safety
 * `start` must point to `len` doubles; `out_final` must be null or point
 * to `len` writable doubles; `out_states` must be null or valid.
 */
ReebflowStatus reebflow_flow(const struct ReebflowLink *link,
                             const double *start,
                             uintptr_t len,
                             double dt0,
                             double grad_tol,
                             double t_max,
                             double *out_final,
                             uintptr_t *out_states);

/**
 * Solve the n = 1 soliton for weights `(a0, a1)`; null on failure.
 */
struct ReebflowSoliton *reebflow_soliton_new(double a0, double a1);

/**
 * Release a soliton handle; null is accepted.
 *
 * # Safety
 * `soliton` must come from `reebflow_soliton_new` and not be freed twice.
 */
void reebflow_soliton_free(struct ReebflowSoliton *soliton);

/**
 * Fill the summary struct for a solved soliton.
 *
 * # Safety
 * `soliton` must be a live handle and `out` a valid pointer.
 */
ReebflowStatus reebflow_soliton_summary(const struct ReebflowSoliton *soliton,
                                        struct ReebflowSolitonSummary *out);

/**
 * Number of grid samples held by a soliton handle.
 *
 * # Safety
 * `soliton` must be a live handle (null returns 0).
 */
uintptr_t reebflow_soliton_grid_len(const struct ReebflowSoliton *soliton);

/**
 * Copy the profile samples into caller buffers of capacity `cap`.
 * Any of `xs`, `phis`, `kts`, `fs` may be null to skip that column.
 *
 * # Safety
 * Non-null buffers must hold at least `cap` writable doubles.
 */
ReebflowStatus reebflow_soliton_copy_grid(const struct ReebflowSoliton *soliton,
                                          double *xs,
                                          double *phis,
                                          double *kts,
                                          double *fs,
                                          uintptr_t cap);

/**
 * Soliton entropy data for weights `(a0, a1)` at n = 1.
 *
 * # Safety
 * `link` must be a live n = 1 link handle and `out` a valid pointer.
 */
ReebflowStatus reebflow_entropy(const struct ReebflowLink *link,
                                double a0,
                                double a1,
                                struct ReebflowEntropyReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REEBFLOW_H */
