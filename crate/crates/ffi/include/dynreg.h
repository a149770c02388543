#ifndef DYNREG_H
#define DYNREG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Learner selector for [`dynreg_learner_new`].
typedef enum DynregAlgorithm {
  DYNREG_ALGORITHM_OGD = 0,
  DYNREG_ALGORITHM_OEGD = 1,
  DYNREG_ALGORITHM_ADER = 2,
  DYNREG_ALGORITHM_SWORD = 3,
  DYNREG_ALGORITHM_SWORD_PLUS_PLUS = 4,
  DYNREG_ALGORITHM_SWORD_BANDIT_VARIATION = 5,
  DYNREG_ALGORITHM_SWORD_BANDIT_ZERO = 6,
  DYNREG_ALGORITHM_SWORD_BANDIT_BEST = 7,
} DynregAlgorithm;

// Result of every fallible call.
typedef enum DynregStatus {
  DYNREG_STATUS_OK = 0,
  DYNREG_STATUS_NULL_POINTER = 1,
  DYNREG_STATUS_DIMENSION_MISMATCH = 2,
  DYNREG_STATUS_NON_FINITE = 3,
  DYNREG_STATUS_INVALID_DOMAIN = 4,
  DYNREG_STATUS_INVALID_PARAMETER = 5,
  DYNREG_STATUS_ROUND_OUT_OF_RANGE = 6,
  DYNREG_STATUS_UNSUPPORTED = 7,
  DYNREG_STATUS_IO = 8,
  DYNREG_STATUS_PANIC = 9,
} DynregStatus;

// Opaque feasible domain.
typedef struct DynregDomain DynregDomain;

// Opaque online learner with its run-wide query counter.
typedef struct DynregLearner DynregLearner;

// `f(x)` for `x` of length `dim`.
typedef double (*DynregValueFn)(const double *x, uintptr_t dim, void *user_data);

// Writes `∇f(x)` into `out`, both of length `dim`.
typedef void (*DynregGradientFn)(const double *x, uintptr_t dim, double *out, void *user_data);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error of this thread into `buf` (NUL-terminated,
// truncated to `len − 1` bytes) and returns its full length in bytes.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
uintptr_t dynreg_last_error_message(char *buf, uintptr_t len);

// Euclidean ball of radius `radius` around `center[0..dim]`.
//
// # Safety
// `center` must point to `dim` readable doubles and `out` must be writable.
enum DynregStatus dynreg_domain_ball(const double *center,
                                     uintptr_t dim,
                                     double radius,
                                     struct DynregDomain **out);

// Axis-aligned box `[lower, upper]`.
//
// # Safety
// `lower` and `upper` must point to `dim` readable doubles and `out` must be writable.
enum DynregStatus dynreg_domain_box(const double *lower,
                                    const double *upper,
                                    uintptr_t dim,
                                    struct DynregDomain **out);

// # Safety
// `domain` must be null or a handle from a `dynreg_domain_*` constructor not yet freed.
void dynreg_domain_free(struct DynregDomain *domain);

// Dimension of the domain, 0 for a null handle.
//
// # Safety
// `domain` must be null or a live handle.
uintptr_t dynreg_domain_dim(const struct DynregDomain *domain);

// Euclidean diameter, NaN for a null handle.
//
// # Safety
// `domain` must be null or a live handle.
double dynreg_domain_diameter(const struct DynregDomain *domain);

// Euclidean projection of `x` onto the domain, written to `out`.
//
// # Safety
// `x` and `out` must point to `dim` doubles; they may alias.
enum DynregStatus dynreg_domain_project(const struct DynregDomain *domain,
                                        const double *x,
                                        double *out,
                                        uintptr_t dim);

// Learner tuned for domain, gradient bound `G`, smoothness `L` and horizon
// `T` with default parameters. `seed` drives the bandit coordinate sampling
// and is ignored otherwise. The domain is copied.
//
// # Safety
// `domain` must be a live handle and `out` must be writable.
enum DynregStatus dynreg_learner_new(enum DynregAlgorithm algorithm,
                                     const struct DynregDomain *domain,
                                     double gradient_bound,
                                     double smoothness,
                                     uintptr_t horizon,
                                     uint64_t seed,
                                     struct DynregLearner **out);

// # Safety
// `learner` must be null or a handle from [`dynreg_learner_new`] not yet freed.
void dynreg_learner_free(struct DynregLearner *learner);

// Copies the decision the next round will play into `out`.
//
// # Safety
// `learner` must be live and `out` must point to `dim` writable doubles.
enum DynregStatus dynreg_learner_decision(const struct DynregLearner *learner,
                                          double *out,
                                          uintptr_t dim);

// Plays one round against the loss given by `value` and `gradient`.
// Writes the played point to `played` (if non-null, `dim` doubles) and the
// incurred loss to `loss` (if non-null).
//
// # Safety
// `learner` must be live; the callbacks must be valid for points of the
// learner's dimension and must not call back into this learner.
enum DynregStatus dynreg_learner_round(struct DynregLearner *learner,
                                       DynregValueFn value,
                                       DynregGradientFn gradient,
                                       void *user_data,
                                       double *played,
                                       double *loss);

// Cumulative gradient and value queries made by the learner so far.
//
// # Safety
// `learner` must be live; the output pointers may be null.
enum DynregStatus dynreg_learner_queries(const struct DynregLearner *learner,
                                         uint64_t *gradient_queries,
                                         uint64_t *value_queries);

// Rounds played so far.
//
// # Safety
// `learner` must be null or live.
uintptr_t dynreg_learner_rounds(const struct DynregLearner *learner);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DYNREG_H */
