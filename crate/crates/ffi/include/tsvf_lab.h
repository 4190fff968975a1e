#ifndef TSVF_LAB_H
#define TSVF_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum TsvfStatus {
  TSVF_STATUS_OK = 0,
  TSVF_STATUS_NULL_POINTER = 1,
  TSVF_STATUS_INVALID_ARGUMENT = 2,
  TSVF_STATUS_DIMENSION_MISMATCH = 3,
  TSVF_STATUS_ZERO_NORM = 4,
  TSVF_STATUS_NOT_HERMITIAN = 5,
  TSVF_STATUS_POST_SELECTION_UNREACHABLE = 6,
  TSVF_STATUS_WEAK_VALUE_UNDEFINED = 7,
  TSVF_STATUS_UNKNOWN_SCENARIO = 8,
  TSVF_STATUS_BUFFER_TOO_SMALL = 9,
  TSVF_STATUS_NUMERICAL_FAILURE = 10,
  TSVF_STATUS_PANIC = 11,
} TsvfStatus;

/**
 * A Hermitian operator.
 */
typedef struct TsvfObservable TsvfObservable;

/**
 * A normalized state vector.
 */
typedef struct TsvfState TsvfState;

/**
 * A pre-selected and a post-selected state.
 */
typedef struct TsvfTwoState TsvfTwoState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *tsvf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tsvf_version(void);

/**
 * Builds and normalizes a state from `len` amplitudes. `im` may be null for real amplitudes.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `len` doubles; `out` must be writable.
 */
enum TsvfStatus tsvf_state_new(const double *re,
                               const double *im,
                               size_t len,
                               struct TsvfState **out);

/**
 * Spin-1/2 state pointing up along the direction `(theta, phi)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum TsvfStatus tsvf_state_spin_up(double theta, double phi, struct TsvfState **out);

/**
 * # Safety
 * `state` must be null or a handle from this library not yet freed.
 */
void tsvf_state_free(struct TsvfState *state);

/**
 * Dimension of the state, 0 for null.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t tsvf_state_dim(const struct TsvfState *state);

/**
 * Copies the amplitudes into `re`/`im`, each with room for `capacity` values.
 *
 * # Safety
 * `re` and `im` must be writable for `capacity` doubles.
 */
enum TsvfStatus tsvf_state_amplitudes(const struct TsvfState *state,
                                      double *re,
                                      double *im,
                                      size_t capacity);

/**
 * Kronecker product `a ⊗ b`.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` must be writable.
 */
enum TsvfStatus tsvf_state_tensor(const struct TsvfState *a,
                                  const struct TsvfState *b,
                                  struct TsvfState **out);

/**
 * `⟨bra|ket⟩`.
 *
 * # Safety
 * `bra`, `ket` must be live handles; `out_re`, `out_im` must be writable.
 */
enum TsvfStatus tsvf_state_inner(const struct TsvfState *bra,
                                 const struct TsvfState *ket,
                                 double *out_re,
                                 double *out_im);

/**
 * Builds an observable from a row-major `dim × dim` matrix; `im` may be null.
 *
 * # Safety
 * `re` (and `im` when non-null) must point to `dim * dim` doubles; `out` must be writable.
 */
enum TsvfStatus tsvf_observable_new(const double *re,
                                    const double *im,
                                    size_t dim,
                                    struct TsvfObservable **out);

/**
 * Spin component `n·σ` along `(theta, phi)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum TsvfStatus tsvf_observable_spin(double theta, double phi, struct TsvfObservable **out);

/**
 * `a ⊗ b`.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` must be writable.
 */
enum TsvfStatus tsvf_observable_tensor(const struct TsvfObservable *a,
                                       const struct TsvfObservable *b,
                                       struct TsvfObservable **out);

/**
 * # Safety
 * `obs` must be null or a handle from this library not yet freed.
 */
void tsvf_observable_free(struct TsvfObservable *obs);

/**
 * Copies both states into a new two-state handle.
 *
 * # Safety
 * `pre`, `post` must be live handles; `out` must be writable.
 */
enum TsvfStatus tsvf_two_state_new(const struct TsvfState *pre,
                                   const struct TsvfState *post,
                                   struct TsvfTwoState **out);

/**
 * # Safety
 * `tsv` must be null or a handle from this library not yet freed.
 */
void tsvf_two_state_free(struct TsvfTwoState *tsv);

/**
 * ABL probabilities for an ideal measurement of `obs`, one per distinct
 * eigenvalue in ascending order. `out_len` always receives the number of
 * outcomes; if `capacity` is smaller the call fails with `BufferTooSmall`.
 * `eigenvalues` may be null.
 *
 * # Safety
 * `probabilities` (and `eigenvalues` when non-null) must be writable for
 * `capacity` doubles; `out_len` must be writable.
 */
enum TsvfStatus tsvf_abl_probabilities(const struct TsvfTwoState *tsv,
                                       const struct TsvfObservable *obs,
                                       double *probabilities,
                                       double *eigenvalues,
                                       size_t capacity,
                                       size_t *out_len);

/**
 * Weak value `⟨post|A|pre⟩ / ⟨post|pre⟩`.
 *
 * # Safety
 * `tsv`, `obs` must be live handles; `out_re`, `out_im` must be writable.
 */
enum TsvfStatus tsvf_weak_value(const struct TsvfTwoState *tsv,
                                const struct TsvfObservable *obs,
                                double *out_re,
                                double *out_im);

/**
 * Runs catalog scenarios and returns the JSON report. `names` is a
 * comma-separated list, or null/empty for the whole catalog. The string must
 * be released with [`tsvf_string_free`]. `all_passed` may be null.
 *
 * # Safety
 * `names` must be null or NUL-terminated; `out_json` must be writable.
 */
enum TsvfStatus tsvf_run_scenarios_json(const char *names,
                                        uint64_t trials,
                                        uint64_t seed,
                                        double sigma,
                                        char **out_json,
                                        bool *all_passed);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void tsvf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TSVF_LAB_H */
