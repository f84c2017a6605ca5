#ifndef SDC_H
#define SDC_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum SdcStatus {
  SDC_STATUS_OK = 0,
  SDC_STATUS_NULL_POINTER = 1,
  SDC_STATUS_INVALID_ARGUMENT = 2,
  SDC_STATUS_DIMENSION_MISMATCH = 3,
  SDC_STATUS_DIMENSION_OVERFLOW = 4,
  SDC_STATUS_UNKNOWN_CASE = 5,
  SDC_STATUS_NO_BRACKET = 6,
  SDC_STATUS_UNSUPPORTED = 7,
  SDC_STATUS_PANIC = 99,
} SdcStatus;

/**
 * Noise family used by the `d`-dimensional cases.
 */
typedef enum SdcNoise {
  SDC_NOISE_DEPOLARISING = 0,
  SDC_NOISE_QUASICLASSICAL = 1,
} SdcNoise;

/**
 * Input state for the cases that accept one.
 */
typedef enum SdcStateKind {
  SDC_STATE_KIND_BELL = 0,
  SDC_STATE_KIND_WERNER = 1,
  SDC_STATE_KIND_BELL_DIAGONAL = 2,
  SDC_STATE_KIND_PRODUCT = 3,
} SdcStateKind;

/**
 * Weyl-Pauli channel on a fixed subsystem layout.
 */
typedef struct SdcChannel SdcChannel;

/**
 * Density matrix with its subsystem layout.
 */
typedef struct SdcState SdcState;

/**
 * Case parameters. Fill with [`sdc_params_default`] and override fields.
 * `q` is ignored when NaN; `q4` and `p4` only when their `has_` flag is set.
 */
typedef struct SdcParams {
  size_t d;
  size_t k;
  double p;
  double mu;
  double eta;
  double q;
  double q4[4];
  bool has_q4;
  double p4[4];
  bool has_p4;
  enum SdcNoise noise;
  enum SdcStateKind state;
  /**
   * Noise on the receiver instead of the sender for one-sided cases.
   */
  bool receiver_side;
} SdcParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if it succeeded.
 * Release with [`sdc_string_free`].
 */
char *sdc_last_error_message(void);

/**
 * # Safety
 * `s` must be null or come from this library.
 */
void sdc_string_free(char *s);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sdc_version(void);

/**
 * # Safety
 * `out` must be writable.
 */
enum SdcStatus sdc_params_default(struct SdcParams *out);

/**
 * Closed-form capacity in bits of the case with id `case_id`.
 *
 * # Safety
 * `case_id` must be a NUL-terminated string, `params` readable, `out` writable.
 */
enum SdcStatus sdc_capacity(const char *case_id, const struct SdcParams *params, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum SdcStatus sdc_state_bell(size_t d, struct SdcState **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum SdcStatus sdc_state_werner(size_t d, double eta, struct SdcState **out);

/**
 * Qubit Bell-diagonal state from four weights.
 *
 * # Safety
 * `p4` must point to four doubles and `out` must be writable.
 */
enum SdcStatus sdc_state_bell_diagonal(const double *p4, struct SdcState **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum SdcStatus sdc_state_ghz(size_t parties, struct SdcState **out);

/**
 * `k` copies of a bipartite state with all sender halves first.
 *
 * # Safety
 * `state` must be a live handle and `out` writable.
 */
enum SdcStatus sdc_state_k_copies(const struct SdcState *state, size_t k, struct SdcState **out);

/**
 * Total dimension, or 0 for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t sdc_state_dim(const struct SdcState *state);

/**
 * Von Neumann entropy in bits.
 *
 * # Safety
 * `state` must be a live handle and `out` writable.
 */
enum SdcStatus sdc_state_entropy(const struct SdcState *state, double *out);

/**
 * # Safety
 * `state` must be null or a handle not yet freed.
 */
void sdc_state_free(struct SdcState *state);

/**
 * Independent depolarising noise on both halves of a `d x d` system.
 *
 * # Safety
 * `out` must be writable.
 */
enum SdcStatus sdc_channel_depolarising(size_t d, double p, struct SdcChannel **out);

/**
 * Qubit quasi-classical noise on both sides with correlation degree `mu`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SdcStatus sdc_channel_quasiclassical(double p, double mu, struct SdcChannel **out);

/**
 * The same qubit Pauli error on all `parties` qubits.
 *
 * # Safety
 * `q4` must point to four doubles and `out` must be writable.
 */
enum SdcStatus sdc_channel_fully_correlated(const double *q4,
                                            size_t parties,
                                            struct SdcChannel **out);

/**
 * Channel output as a new state handle.
 *
 * # Safety
 * `channel` and `state` must be live handles and `out` writable.
 */
enum SdcStatus sdc_channel_apply(const struct SdcChannel *channel,
                                 const struct SdcState *state,
                                 struct SdcState **out);

/**
 * Largest covariance residual under sender-side Weyl operators on `samples` random states.
 *
 * # Safety
 * `channel` must be a live handle and `out` writable.
 */
enum SdcStatus sdc_channel_covariance(const struct SdcChannel *channel,
                                      size_t senders,
                                      size_t samples,
                                      uint64_t seed,
                                      double *out);

/**
 * # Safety
 * `channel` must be null or a handle not yet freed.
 */
void sdc_channel_free(struct SdcChannel *channel);

/**
 * Holevo quantity of the uniform Weyl ensemble on the leading `sender_dim` block.
 *
 * # Safety
 * `state` and `channel` must be live handles and `out` writable.
 */
enum SdcStatus sdc_holevo_chi_weyl(const struct SdcState *state,
                                   const struct SdcChannel *channel,
                                   size_t sender_dim,
                                   double *out);

/**
 * Restart search for the smallest output entropy over sender encodings, unitary
 * or (when `cptp` is set) general CPTP. Writes the entropy, the implied
 * capacity, and whether the best restart converged.
 *
 * # Safety
 * `state` and `channel` must be live handles; outputs must be writable.
 */
enum SdcStatus sdc_min_output_entropy(const struct SdcState *state,
                                      const struct SdcChannel *channel,
                                      size_t sender_dim,
                                      bool cptp,
                                      size_t restarts,
                                      uint64_t seed,
                                      double *out_entropy,
                                      double *out_capacity,
                                      bool *out_converged);

/**
 * Noise level where a Bell pair under two-sided depolarising noise stops beating separable inputs.
 *
 * # Safety
 * `out` must be writable.
 */
enum SdcStatus sdc_depolarising_threshold(double tol, double *out);

/**
 * Correlation degree where unitary encoding catches up with reset
 * pre-processing at noise `p`. `found` is false when there is none.
 *
 * # Safety
 * `out` and `found` must be writable.
 */
enum SdcStatus sdc_crossover_mu(double p, double tol, double *out, bool *found);

/**
 * Werner parameter where `2 - S(rho_w)` meets `1 - H2(q)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SdcStatus sdc_crossover_eta(double q, double tol, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SDC_H */
