#ifndef RIS_MISALIGN_H
#define RIS_MISALIGN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define RIS_PLANE_IN 0

#define RIS_PLANE_NORMAL 1

#define RIS_MODEL_EXACT 0

#define RIS_MODEL_APPROX 1

#define RIS_LIMIT_FAR_RAYLEIGH 0

#define RIS_LIMIT_NEAR_RAYLEIGH 1

typedef enum RisStatus {
  RIS_STATUS_OK = 0,
  RIS_STATUS_NULL_POINTER = 1,
  RIS_STATUS_INVALID_PARAMETER = 2,
  RIS_STATUS_INCONSISTENT_FOOTPRINT = 3,
  RIS_STATUS_UE_OFF_STEERING_PLANE = 4,
  RIS_STATUS_GRAZING_BEAM = 5,
  RIS_STATUS_BACKWARD_BEAM = 6,
  RIS_STATUS_OUTSIDE_SUPPORT = 7,
  RIS_STATUS_SAMPLER_TOO_SMALL = 8,
  RIS_STATUS_INVALID_ENUM = 9,
  RIS_STATUS_BUFFER_TOO_SMALL = 10,
  RIS_STATUS_PANIC = 99,
} RisStatus;

/**
 * Result of a Monte-Carlo run.
 */
typedef struct RisEmpirical RisEmpirical;

/**
 * A validated link: physical configuration plus geometry.
 */
typedef struct RisLink RisLink;

/**
 * Link description. Give `w_ris_m`, or both `d_ap_m` and `g_ap`, or all
 * three (checked for consistency); unused fields must be NaN.
 */
typedef struct RisLinkParams {
  double frequency_hz;
  double power_noise_ratio;
  double reflection_magnitude;
  double receiver_gain;
  double w_ris_m;
  double d_ap_m;
  double g_ap;
  double d_ue_m;
  double theta_ue_rad;
} RisLinkParams;

/**
 * Closed-form distribution parameters.
 */
typedef struct RisClosedForm {
  double alpha;
  double slope;
} RisClosedForm;

typedef struct RisSummary {
  size_t n_samples;
  uint64_t seed;
  uint64_t redraws;
  double mean;
  double variance;
  double skewness;
} RisSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Validate `params` and create a link handle in `*out`.
 *
 * # Safety
 * `params` must be null or point to a valid `RisLinkParams`; `out` must be
 * null or writable.
 */
enum RisStatus ris_link_new(const struct RisLinkParams *params, struct RisLink **out);

/**
 * Release a link handle. Null is a no-op.
 *
 * # Safety
 * `link` must be null or a handle from [`ris_link_new`] not yet freed.
 */
void ris_link_free(struct RisLink *link);

/**
 * SNR at the UE for a beam aimed exactly at it (the aligned SNR).
 *
 * # Safety
 * `link` must be null or a live handle; `out` null or writable.
 */
enum RisStatus ris_link_snr_at_ue(const struct RisLink *link, double *out);

/**
 * Rayleigh length of the reflected beam, metres.
 *
 * # Safety
 * As [`ris_link_snr_at_ue`].
 */
enum RisStatus ris_link_rayleigh_length(const struct RisLink *link, double *out);

/**
 * SNR at the UE when the beam is steered along `(theta_b, phi_b)`.
 *
 * # Safety
 * As [`ris_link_snr_at_ue`].
 */
enum RisStatus ris_link_snr_at_direction(const struct RisLink *link,
                                         double theta_b,
                                         double phi_b,
                                         double *out);

/**
 * Beam direction produced by in-plane error `dx` and normal-plane error
 * `dy` around UE elevation `theta_ue`.
 *
 * # Safety
 * `theta_b` and `phi_b` must be null or writable.
 */
enum RisStatus ris_error_angles(double theta_ue,
                                double dx,
                                double dy,
                                double *theta_b,
                                double *phi_b);

/**
 * Closed-form `(alpha, slope)` for errors on `plane` (`RIS_PLANE_*`).
 *
 * # Safety
 * As [`ris_link_snr_at_ue`].
 */
enum RisStatus ris_link_closed_form(const struct RisLink *link,
                                    uint32_t plane_id,
                                    struct RisClosedForm *out);

/**
 * Leading-order parameters in a Rayleigh-length limit (`RIS_LIMIT_*`).
 *
 * # Safety
 * As [`ris_link_snr_at_ue`].
 */
enum RisStatus ris_link_asymptotic(const struct RisLink *link,
                                   uint32_t plane_id,
                                   uint32_t limit,
                                   struct RisClosedForm *out);

/**
 * Density at `x`, which must lie strictly inside `(0, alpha)`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum RisStatus ris_pdf(struct RisClosedForm cf, double sigma, double x, double *out);

/**
 * Distribution function at `x`, clamped to 0 below the support and 1 above.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum RisStatus ris_cdf(struct RisClosedForm cf, double sigma, double x, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum RisStatus ris_mean(struct RisClosedForm cf, double sigma, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum RisStatus ris_variance(struct RisClosedForm cf, double sigma, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum RisStatus ris_skewness(struct RisClosedForm cf, double sigma, double *out);

/**
 * Error standard deviation (rad) at which the skewness vanishes.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum RisStatus ris_zero_skew_sigma(struct RisClosedForm cf, double *out);

/**
 * Draw `n_samples` errors of standard deviation `sigma` on `plane_id` and
 * evaluate the SNR with `model_id` (`RIS_MODEL_*`). Deterministic in
 * `(seed, n_samples)`.
 *
 * # Safety
 * `link` must be null or a live handle; `out` null or writable.
 */
enum RisStatus ris_sample(const struct RisLink *link,
                          uint32_t plane_id,
                          uint32_t model_id,
                          double sigma,
                          size_t n_samples,
                          uint64_t seed,
                          size_t n_bins,
                          struct RisEmpirical **out);

/**
 * # Safety
 * `emp` must be null or a handle from [`ris_sample`] not yet freed.
 */
void ris_empirical_free(struct RisEmpirical *emp);

/**
 * # Safety
 * `emp` must be null or a live handle; `out` null or writable.
 */
enum RisStatus ris_empirical_summary(const struct RisEmpirical *emp, struct RisSummary *out);

/**
 * Fraction of samples not exceeding `x`.
 *
 * # Safety
 * As [`ris_empirical_summary`].
 */
enum RisStatus ris_empirical_cdf(const struct RisEmpirical *emp, double x, double *out);

/**
 * Kolmogorov–Smirnov distance to the closed-form distribution.
 *
 * # Safety
 * As [`ris_empirical_summary`].
 */
enum RisStatus ris_empirical_ks(const struct RisEmpirical *emp,
                                struct RisClosedForm cf,
                                double sigma,
                                double *out);

/**
 * Copy histogram bin centres and densities into caller buffers of length
 * `len`. The bin count is always stored in `*n_bins`; if `len` is too small
 * nothing else is written and `BufferTooSmall` is returned.
 *
 * # Safety
 * `centers` and `densities` must be null or point to `len` writable
 * doubles; `n_bins` null or writable.
 */
enum RisStatus ris_empirical_histogram(const struct RisEmpirical *emp,
                                       double *centers,
                                       double *densities,
                                       size_t len,
                                       size_t *n_bins);

/**
 * Description of the last failure on this thread, or an empty string after
 * a success. Valid until the next call into this library on the thread.
 */
const char *ris_last_error_message(void);

/**
 * Library version, a static NUL-terminated string.
 */
const char *ris_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RIS_MISALIGN_H */
