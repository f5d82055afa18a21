#ifndef SWVAR_H
#define SWVAR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes returned by every fallible function.
 */
typedef enum SwvarStatus {
  SWVAR_STATUS_OK = 0,
  SWVAR_STATUS_NULL_POINTER = 1,
  SWVAR_STATUS_INVALID_ARGUMENT = 2,
  SWVAR_STATUS_STRUCTURAL = 3,
  SWVAR_STATUS_INSUFFICIENT_DATA = 4,
  SWVAR_STATUS_UNSTABLE = 5,
  SWVAR_STATUS_NUMERICAL = 6,
  SWVAR_STATUS_BUFFER_TOO_SMALL = 7,
  SWVAR_STATUS_IO = 8,
  SWVAR_STATUS_PANIC = 9,
} SwvarStatus;

/*
 Estimated stacked coefficient matrix with solver diagnostics.
 */
typedef struct SwvarFit SwvarFit;

/*
 VAR(d) model.
 */
typedef struct SwvarModel SwvarModel;

/*
 Simulated or user-supplied trajectory of T+1 observations.
 */
typedef struct SwvarTrajectory SwvarTrajectory;

/*
 Dependence summary of a VAR model.
 */
typedef struct SwvarDependenceReport {
  double c_factor;
  double rho;
  double op_norm;
  size_t truncation_terms;
  double tail_bound;
} SwvarDependenceReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *swvar_version(void);

/*
 Copies the calling thread's last error message (NUL-terminated,
 truncated to `len`) and returns the full message length in bytes.

 # Safety
 `buf` must be valid for `len` bytes or null.
 */
size_t swvar_last_error_message(char *buf, size_t len);

/*
 Builds a VAR(d) model from `d` row-major p×p blocks `B_1..B_d`
 (`coeffs` holds `d·p·p` values).

 # Safety
 `coeffs` must point to `d·p·p` doubles; `out` must be writable.
 */
enum SwvarStatus swvar_model_new(size_t p, size_t d, const double *coeffs, struct SwvarModel **out);

/*
 # Safety
 `model` must come from `swvar_model_new` (or be null) and not be used
 afterwards.
 */
void swvar_model_free(struct SwvarModel *model);

/*
 # Safety
 Pointers must be valid.
 */
enum SwvarStatus swvar_model_dims(const struct SwvarModel *model, size_t *p, size_t *d);

/*
 Spectral radius of the companion matrix.

 # Safety
 Pointers must be valid.
 */
enum SwvarStatus swvar_model_spectral_radius(const struct SwvarModel *model, double *out);

/*
 Writes the dp×dp companion matrix (row-major) into `out`.

 # Safety
 `out` must be valid for `len` doubles.
 */
enum SwvarStatus swvar_model_companion(const struct SwvarModel *model, double *out, size_t len);

/*
 Dependence factor of the model driven by noise covariance `sigma`
 (p×p row-major; null means identity).

 # Safety
 `sigma` must hold p·p doubles when non-null; `out` must be writable.
 */
enum SwvarStatus swvar_dependence_factor(const struct SwvarModel *model,
                                         const double *sigma,
                                         struct SwvarDependenceReport *out);

/*
 Stationary covariance `Σ = BᵀΣB + Σ_η` of a VAR(1) with transition `b`.

 # Safety
 `b`, `sigma_eta` and `out` must each hold p·p doubles.
 */
enum SwvarStatus swvar_solve_lyapunov(size_t p,
                                      const double *b,
                                      const double *sigma_eta,
                                      double *out);

/*
 Simulates `horizon + 1` observations with Subweibull(`gamma2`) noise of
 standard deviation `scale` after `burn_in` discarded steps.

 # Safety
 Pointers must be valid.
 */
enum SwvarStatus swvar_simulate(const struct SwvarModel *model,
                                double gamma2,
                                double scale,
                                size_t horizon,
                                size_t burn_in,
                                uint64_t seed,
                                struct SwvarTrajectory **out);

/*
 Wraps a row-major `rows × p` data buffer as a trajectory.

 # Safety
 `data` must hold rows·p doubles; `out` must be writable.
 */
enum SwvarStatus swvar_trajectory_new(size_t rows,
                                      size_t p,
                                      const double *data,
                                      struct SwvarTrajectory **out);

/*
 # Safety
 `traj` must come from this library (or be null) and not be reused.
 */
void swvar_trajectory_free(struct SwvarTrajectory *traj);

/*
 # Safety
 Pointers must be valid.
 */
enum SwvarStatus swvar_trajectory_dims(const struct SwvarTrajectory *traj, size_t *rows, size_t *p);

/*
 # Safety
 `out` must be valid for `len` doubles.
 */
enum SwvarStatus swvar_trajectory_copy(const struct SwvarTrajectory *traj, double *out, size_t len);

/*
 ℓ1-penalized VAR(d) fit at a fixed λ.

 # Safety
 Pointers must be valid.
 */
enum SwvarStatus swvar_fit_lasso(const struct SwvarTrajectory *traj,
                                 size_t d,
                                 double lambda,
                                 struct SwvarFit **out);

/*
 # Safety
 `fit` must come from this library (or be null) and not be reused.
 */
void swvar_fit_free(struct SwvarFit *fit);

/*
 Shape of the stacked coefficient matrix (`dp × p`).

 # Safety
 Pointers must be valid.
 */
enum SwvarStatus swvar_fit_dims(const struct SwvarFit *fit, size_t *rows, size_t *cols);

/*
 # Safety
 `out` must be valid for `len` doubles.
 */
enum SwvarStatus swvar_fit_coeffs(const struct SwvarFit *fit, double *out, size_t len);

/*
 # Safety
 Pointers must be valid.
 */
enum SwvarStatus swvar_fit_info(const struct SwvarFit *fit, size_t *iters, bool *converged);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SWVAR_H */
