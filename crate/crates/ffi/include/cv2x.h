#ifndef CV2X_H
#define CV2X_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum Cv2xStatus {
  CV2X_STATUS_OK = 0,
  CV2X_STATUS_NULL_POINTER = 1,
  CV2X_STATUS_INVALID_PARAMETER = 2,
  CV2X_STATUS_NUMERIC = 3,
  /**
   * Conditioning on an event of probability zero.
   */
  CV2X_STATUS_DEGENERATE = 4,
  /**
   * Parameters outside the regime the load model covers.
   */
  CV2X_STATUS_UNSUPPORTED = 5,
  CV2X_STATUS_BUFFER_TOO_SMALL = 6,
  CV2X_STATUS_PANIC = 7,
} Cv2xStatus;

/**
 * Validated parameters with cached derived quantities.
 */
typedef struct Cv2xModel Cv2xModel;

/**
 * Model constants in SI units and linear scale; see `cv2x_params_default`.
 */
typedef struct Cv2xParams {
  double mu_l;
  double lambda_1;
  double lambda_2;
  double lambda_r;
  double alpha;
  double p1;
  double p2;
  double g1_main;
  double g1_side;
  double g2_main;
  double g2_side;
  double q_c;
  double b1;
  double b2;
  uint32_t m1;
  uint32_t m20;
  uint32_t m21;
  double omega_1;
  double omega_20;
  double omega_21;
  double sigma_1;
  double sigma_20;
  double sigma_21;
  double bandwidth;
} Cv2xParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *cv2x_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cv2x_version(void);

/**
 * Fills `out` with the baseline network.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `Cv2xParams`.
 */
enum Cv2xStatus cv2x_params_default(struct Cv2xParams *out);

/**
 * Validates `params` and creates a model handle.
 *
 * # Safety
 * `params` must point to a valid `Cv2xParams`; `out` to writable storage
 * for one pointer.
 */
enum Cv2xStatus cv2x_model_new(const struct Cv2xParams *params, struct Cv2xModel **out);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` must be null or a handle from `cv2x_model_new` not yet freed.
 */
void cv2x_model_free(struct Cv2xModel *model);

/**
 * Probabilities of associating with tier 1 and with a tier-2 node on the
 * receiver's road.
 *
 * # Safety
 * `model` must be a live handle; outputs must be writable.
 */
enum Cv2xStatus cv2x_association_prob(const struct Cv2xModel *model,
                                      double *out_tier1,
                                      double *out_tier2);

/**
 * SIR coverage probability at the linear threshold `beta`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum Cv2xStatus cv2x_coverage(const struct Cv2xModel *model, double beta, double *out);

/**
 * Rate coverage at `target_bps`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum Cv2xStatus cv2x_rate_coverage(const struct Cv2xModel *model, double target_bps, double *out);

/**
 * Mean load of the tier-1 node serving the receiver.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum Cv2xStatus cv2x_tier1_mean_load(const struct Cv2xModel *model, double *out);

/**
 * Load PMF of the tier-2 node serving the receiver, indexed by load; entry 0
 * is always zero. `*out_len` receives the required length. When `capacity`
 * is smaller, nothing else is written and `BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * `model` must be a live handle; `out_probs` must be null or hold
 * `capacity` doubles; `out_len` must be writable.
 */
enum Cv2xStatus cv2x_tier2_load_pmf(const struct Cv2xModel *model,
                                    double *out_probs,
                                    size_t capacity,
                                    size_t *out_len);

/**
 * Simulated SIR coverage at `n_betas` linear thresholds, with 95%
 * half-widths. Uses the default simulation window.
 *
 * # Safety
 * `model` must be a live handle; `betas`, `out_estimate` and `out_ci`
 * must each hold `n_betas` doubles (`out_ci` may be null).
 */
enum Cv2xStatus cv2x_mc_coverage(const struct Cv2xModel *model,
                                 uint64_t seed,
                                 uint64_t n_trials,
                                 const double *betas,
                                 size_t n_betas,
                                 double *out_estimate,
                                 double *out_ci);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CV2X_H */
