#pragma once

/* Generated with cbindgen:0.29.4 */

/* Generated from the fou-ffi crate; regenerate with cbindgen rather than editing. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>
typedef struct FouEnsemble FouEnsemble;

/**
 * Result of every fallible call in this ABI.
 */
typedef enum FouStatus {
  FouStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  FouStatus_NullPointer = 1,
  /**
   * A parameter failed validation (range or finiteness).
   */
  FouStatus_InvalidParameter = 2,
  /**
   * Arguments outside the mathematical domain of the quantity.
   */
  FouStatus_Domain = 3,
  /**
   * Structurally invalid usage (bad index, wrong buffer length).
   */
  FouStatus_Usage = 4,
  /**
   * A numerical routine failed (factorization, non-finite result).
   */
  FouStatus_Numerical = 5,
  /**
   * Adaptive quadrature stopped before reaching its tolerance.
   */
  FouStatus_NoConvergence = 6,
  FouStatus_Config = 7,
  FouStatus_Io = 8,
  /**
   * An internal panic was caught at the boundary.
   */
  FouStatus_Panic = 9,
} FouStatus;

/**
 * Initial condition for first-kind paths.
 */
typedef enum FouFirstKindInit {
  /**
   * Stationary start from the truncated history integral; pair with
   * a truncation tolerance.
   */
  FouFirstKindInit_Stationary = 0,
  /**
   * Start at zero (transient path).
   */
  FouFirstKindInit_Zero = 1,
} FouFirstKindInit;

/**
 * Construction route for second-kind paths.
 */
typedef enum FouSecondKindMethod {
  /**
   * Extract the short-memory driver, then solve the Langevin
   * recursion on it.
   */
  FouSecondKindMethod_LangevinOnY = 0,
  /**
   * Evaluate the closed integral form against the underlying
   * fractional Brownian motion.
   */
  FouSecondKindMethod_DirectTransform = 1,
} FouSecondKindMethod;

/**
 * Model parameter triple. `gamma` is only read by the second-kind
 * functions; pass 1.0 when it is irrelevant.
 */
typedef struct FouParams {
  double hurst;
  double alpha;
  double gamma;
} FouParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Crate version as a static NUL-terminated string.
 */
const char *fou_version(void);

/**
 * Description of the most recent failure on the calling thread, empty
 * if none. The pointer stays valid until the next failing call on the
 * same thread.
 */
const char *fou_last_error_message(void);

/**
 * Samples fractional Brownian motion exactly (Cholesky of the target
 * covariance) on the uniform grid of `steps` intervals over
 * [0, t_max]. The handle must be released with `fou_ensemble_free`.
 */
enum FouStatus fou_fbm_sample(double hurst,
                              double t_max,
                              uint64_t steps,
                              uint64_t seed,
                              uint64_t count,
                              FouEnsemble **out);

/**
 * Samples the damped time-changed transform of fractional Brownian
 * motion (stationary for every Hurst index) on the uniform grid.
 */
enum FouStatus fou_doob_sample(struct FouParams params,
                               double t_max,
                               uint64_t steps,
                               uint64_t seed,
                               uint64_t count,
                               FouEnsemble **out);

/**
 * Samples the short-memory driver extracted from the damped
 * transform. `refinement` subdivides each grid interval for the
 * internal quadrature (8 is the library default).
 */
enum FouStatus fou_driver_sample(struct FouParams params,
                                 double t_max,
                                 uint64_t steps,
                                 uint64_t refinement,
                                 uint64_t seed,
                                 uint64_t count,
                                 FouEnsemble **out);

/**
 * Samples first-kind paths (Langevin driven by fractional Brownian
 * motion). `trunc_tol` bounds the mass discarded when truncating the
 * stationary history integral; it is ignored for the zero start.
 */
enum FouStatus fou_fou1_sample(struct FouParams params,
                               double t_max,
                               uint64_t steps,
                               uint64_t refinement,
                               uint64_t seed,
                               uint64_t count,
                               enum FouFirstKindInit init,
                               double trunc_tol,
                               FouEnsemble **out);

/**
 * Samples second-kind paths by either construction route. Requires
 * 1/2 < H < 1. `trunc_tol` bounds the discarded stationary history.
 */
enum FouStatus fou_fou2_sample(struct FouParams params,
                               double t_max,
                               uint64_t steps,
                               uint64_t refinement,
                               uint64_t seed,
                               uint64_t count,
                               enum FouSecondKindMethod method,
                               double trunc_tol,
                               FouEnsemble **out);

/**
 * Releases an ensemble handle; null is a no-op.
 */
void fou_ensemble_free(FouEnsemble *handle);

/**
 * Number of paths in the ensemble, 0 for a null handle.
 */
uint64_t fou_ensemble_num_paths(const FouEnsemble *handle);

/**
 * Number of grid points per path, 0 for a null handle.
 */
uint64_t fou_ensemble_num_times(const FouEnsemble *handle);

/**
 * Grid time at the given index.
 */
enum FouStatus fou_ensemble_time(const FouEnsemble *handle, uint64_t idx, double *out);

/**
 * Single path value by (path, time index).
 */
enum FouStatus fou_ensemble_value(const FouEnsemble *handle,
                                  uint64_t path,
                                  uint64_t idx,
                                  double *out);

/**
 * Copies one path into `buffer`, which must hold exactly
 * `fou_ensemble_num_times` doubles.
 */
enum FouStatus fou_ensemble_copy_path(const FouEnsemble *handle,
                                      uint64_t path,
                                      double *buffer,
                                      uint64_t len);

/**
 * Classical Ornstein-Uhlenbeck stationary covariance
 * e^{-alpha |t - s|} / (2 alpha).
 */
enum FouStatus fou_ou_cov(double alpha, double s, double t, double *out);

/**
 * Stationary covariance of the damped time-changed transform.
 */
enum FouStatus fou_doob_cov(struct FouParams params, double s, double t, double *out);

/**
 * Stationary variance (H / alpha)^{2H} of the damped transform.
 */
enum FouStatus fou_doob_variance(struct FouParams params, double *out);

/**
 * Exponential decay rate alpha min(1, (1 - H) / H) of the damped
 * transform's covariance.
 */
enum FouStatus fou_doob_decay_rate(struct FouParams params, double *out);

/**
 * Exponential decay rate min(gamma, (1 - H) / H) of the second-kind
 * covariance.
 */
enum FouStatus fou_fou2_decay_rate(struct FouParams params, double *out);

/**
 * Large-lag expansion of the first-kind stationary covariance with
 * the given number of terms (H != 1/2).
 */
enum FouStatus fou_fou1_cov_asymptotic(struct FouParams params,
                                       double lag,
                                       uint64_t terms,
                                       double *out);

/**
 * Stationary variance of the first-kind process by quadrature.
 * `err_out` (nullable) receives the quadrature error bound.
 */
enum FouStatus fou_fou1_stationary_variance(struct FouParams params, double *out, double *err_out);

/**
 * Variance of the driver at time t by quadrature. `err_out`
 * (nullable) receives the quadrature error bound.
 */
enum FouStatus fou_driver_var(struct FouParams params, double t, double *out, double *err_out);

/**
 * Stationary covariance of the second-kind process at times s, t by
 * quadrature over the truncated moving-average representation;
 * `trunc_tol` bounds the discarded history mass and `err_out`
 * (nullable) receives the combined error bound. Requires 1/2 < H < 1.
 */
enum FouStatus fou_fou2_cov(struct FouParams params,
                            double s,
                            double t,
                            double trunc_tol,
                            double *out,
                            double *err_out);

/**
 * Moving-average kernel of the driver at separation x != 0.
 * Requires 1/2 < H < 1.
 */
enum FouStatus fou_kernel_eval(struct FouParams params, double x, double *out);

/**
 * Variance slope kappa of the driver at large times; the rescaled
 * driver converges weakly to sqrt(kappa) times Brownian motion.
 * Requires 1/2 < H < 1.
 */
enum FouStatus fou_weak_limit_kappa(struct FouParams params, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
