#ifndef PARAJC_H
#define PARAJC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum ParajcStatus {
  PARAJC_STATUS_OK = 0,
  PARAJC_STATUS_NULL_POINTER = 1,
  PARAJC_STATUS_BUFFER_TOO_SMALL = 2,
  PARAJC_STATUS_INVALID_PARAMETER = 3,
  PARAJC_STATUS_OUT_OF_RANGE = 4,
  PARAJC_STATUS_SHAPE_MISMATCH = 5,
  PARAJC_STATUS_SERIES_TOO_SHORT = 6,
  PARAJC_STATUS_EIGENSOLVER = 7,
  PARAJC_STATUS_ZERO_PROBABILITY = 8,
  PARAJC_STATUS_CONVERGENCE_GATE = 9,
  PARAJC_STATUS_INVARIANT = 10,
  PARAJC_STATUS_GRID_TOO_SMALL = 11,
  PARAJC_STATUS_CONFIG = 12,
  PARAJC_STATUS_IO = 13,
  PARAJC_STATUS_PANIC = 14,
} ParajcStatus;

/**
 * Which Wigner closed form to evaluate.
 */
typedef enum ParajcTarget {
  PARAJC_TARGET_EVEN = 0,
  PARAJC_TARGET_ODD = 1,
} ParajcTarget;

/**
 * Sampled observables of one evolution from |e,0⟩.
 */
typedef struct ParajcSeries ParajcSeries;

/**
 * Qubit–cavity system: parameters plus the truncated space.
 */
typedef struct ParajcSystem ParajcSystem;

/**
 * Quantities extracted from the excited-state population.
 */
typedef struct ParajcBeats {
  double fast_period;
  /**
   * NaN when no slow modulation was found.
   */
  double slow_period;
  /**
   * NaN when there is no quiet spot.
   */
  double quiet_time;
  double quiet_excited_population;
  double contrast;
} ParajcBeats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static nul-terminated string.
 */
const char *parajc_version(void);

/**
 * Copy the last error message of this thread into `buf` (nul-terminated,
 * truncated to `capacity`). Returns the full message length in bytes, or 0
 * if the last call succeeded.
 *
 * # Safety
 * `buf` must be null or valid for `capacity` writes.
 */
uintptr_t parajc_last_error_message(char *buf, uintptr_t capacity);

/**
 * Create a system with Fock cutoff `n_max`. Rates are in units of g.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum ParajcStatus parajc_system_new(double detuning,
                                    double coupling,
                                    double parametric,
                                    double kappa,
                                    double gamma,
                                    uintptr_t n_max,
                                    struct ParajcSystem **out);

/**
 * Release a system; null is ignored.
 *
 * # Safety
 * `system` must come from [`parajc_system_new`] and not be freed twice.
 */
void parajc_system_free(struct ParajcSystem *system);

/**
 * Dimension 2(n_max+1) of the qubit–field space; 0 for null.
 *
 * # Safety
 * `system` must be null or a live handle.
 */
uintptr_t parajc_system_dim(const struct ParajcSystem *system);

/**
 * Ascending eigenvalues of H.
 *
 * # Safety
 * `system` must be a live handle; `out` valid for `capacity` writes; `len`
 * null or valid.
 */
enum ParajcStatus parajc_system_eigenvalues(const struct ParajcSystem *system,
                                            double *out,
                                            uintptr_t capacity,
                                            uintptr_t *len);

/**
 * Locate crossing I (`label` = 1) or II (`label` = 2) for the system's g
 * and G; the system's own detuning is ignored.
 *
 * # Safety
 * `system` must be a live handle; `delta_star` and `gap` valid for writes.
 */
enum ParajcStatus parajc_locate_crossing(const struct ParajcSystem *system,
                                         uint32_t label,
                                         double *delta_star,
                                         double *gap);

/**
 * Evolve |e,0⟩ to `t_end`: Schrödinger when κ = γ = 0, Lindblad otherwise.
 *
 * # Safety
 * `system` must be a live handle; `out` valid for one write.
 */
enum ParajcStatus parajc_evolve(const struct ParajcSystem *system,
                                double t_end,
                                double dt_out,
                                double dt_int,
                                struct ParajcSeries **out);

/**
 * Release a series; null is ignored.
 *
 * # Safety
 * `series` must come from [`parajc_evolve`] and not be freed twice.
 */
void parajc_series_free(struct ParajcSeries *series);

/**
 * Number of samples; 0 for null.
 *
 * # Safety
 * `series` must be null or a live handle.
 */
uintptr_t parajc_series_len(const struct ParajcSeries *series);

/**
 * Sample times.
 *
 * # Safety
 * As for [`parajc_system_eigenvalues`].
 */
enum ParajcStatus parajc_series_times(const struct ParajcSeries *series,
                                      double *out,
                                      uintptr_t capacity,
                                      uintptr_t *len);

/**
 * Excited-state population P_e per sample.
 *
 * # Safety
 * As for [`parajc_system_eigenvalues`].
 */
enum ParajcStatus parajc_series_excited_population(const struct ParajcSeries *series,
                                                   double *out,
                                                   uintptr_t capacity,
                                                   uintptr_t *len);

/**
 * Mean photon number per sample.
 *
 * # Safety
 * As for [`parajc_system_eigenvalues`].
 */
enum ParajcStatus parajc_series_mean_photons(const struct ParajcSeries *series,
                                             double *out,
                                             uintptr_t capacity,
                                             uintptr_t *len);

/**
 * Fast and slow periods and the first quiet spot of P_e.
 *
 * # Safety
 * `series` must be a live handle; `out` valid for one write.
 */
enum ParajcStatus parajc_series_beats(const struct ParajcSeries *series, struct ParajcBeats *out);

/**
 * Closed-form Wigner function of the even or odd target state on the square
 * grid [−half_width, half_width]², Im α outer and Re α fastest.
 *
 * # Safety
 * As for [`parajc_system_eigenvalues`].
 */
enum ParajcStatus parajc_wigner_target(enum ParajcTarget target,
                                       double half_width,
                                       double step,
                                       double *out,
                                       uintptr_t capacity,
                                       uintptr_t *len);

/**
 * Numerical Wigner function of a photon density matrix given as separate
 * row-major real and imaginary parts of size `dim`×`dim`. Same grid layout
 * as [`parajc_wigner_target`].
 *
 * # Safety
 * `rho_re` and `rho_im` must be valid for `dim*dim` reads; the output
 * arguments as for [`parajc_system_eigenvalues`].
 */
enum ParajcStatus parajc_wigner_density(const double *rho_re,
                                        const double *rho_im,
                                        uintptr_t dim,
                                        double half_width,
                                        double step,
                                        double *out,
                                        uintptr_t capacity,
                                        uintptr_t *len);

/**
 * Wootters concurrence of a 4×4 two-qubit density matrix (row-major real
 * and imaginary parts).
 *
 * # Safety
 * `rho_re` and `rho_im` must be valid for 16 reads; `out` for one write.
 */
enum ParajcStatus parajc_concurrence(const double *rho_re, const double *rho_im, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARAJC_H */
