#ifndef GPTLAB_H
#define GPTLAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GptStatus {
  GPT_STATUS_OK = 0,
  GPT_STATUS_NULL_POINTER = 1,
  GPT_STATUS_INVALID_ARGUMENT = 2,
  GPT_STATUS_INDEX_OUT_OF_RANGE = 3,
  GPT_STATUS_THEORY_MISMATCH = 4,
  /**
   * An object failed validation (see the error message for the violations).
   */
  GPT_STATUS_INVALID_OBJECT = 5,
  GPT_STATUS_UNSUPPORTED = 6,
  GPT_STATUS_NO_FEASIBLE_CANDIDATE = 7,
  GPT_STATUS_PARSE = 8,
  GPT_STATUS_IO = 9,
  /**
   * A Rust panic was caught at the boundary.
   */
  GPT_STATUS_INTERNAL = 10,
} GptStatus;

typedef enum GptLogBase {
  GPT_LOG_BASE_BITS = 0,
  GPT_LOG_BASE_NATS = 1,
} GptLogBase;

typedef enum GptVerdict {
  GPT_VERDICT_FEASIBLE = 0,
  GPT_VERDICT_INFEASIBLE = 1,
  GPT_VERDICT_UNDETERMINED = 2,
} GptVerdict;

/**
 * A 2 x 2 joint measurement.
 */
typedef struct GptJoint GptJoint;

/**
 * A binary ideal measurement.
 */
typedef struct GptMeasurement GptMeasurement;

/**
 * A polygon, disc or finite theory.
 */
typedef struct GptTheory GptTheory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *gpt_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gpt_version(void);

/**
 * Creates the `n`-gon theory, or the disc when `n == 0`. A nonpositive
 * `tol` selects the default tolerance.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GptStatus gpt_theory_new(uint32_t n, double tol, struct GptTheory **out);

/**
 * Loads a finite theory from its JSON descriptor.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum GptStatus gpt_theory_from_json(const char *json, struct GptTheory **out);

/**
 * # Safety
 * `t` must be null or a handle from this library that has not been freed.
 */
void gpt_theory_free(struct GptTheory *t);

/**
 * Number of stored pure states (0 for the disc).
 *
 * # Safety
 * `t` must be a live theory handle; `out` must be valid for writes.
 */
enum GptStatus gpt_theory_pure_state_count(const struct GptTheory *t, uintptr_t *out);

/**
 * # Safety
 * `t` must be a live theory handle; `out` must be valid for writes.
 */
enum GptStatus gpt_theory_is_self_dual(const struct GptTheory *t, bool *out);

/**
 * # Safety
 * `t` must be a live theory handle; `out` must be valid for writes.
 */
enum GptStatus gpt_theory_is_transitive(const struct GptTheory *t, bool *out);

/**
 * Ideal measurement `{e(i), u - e(i)}` of a polygon theory.
 *
 * # Safety
 * `t` must be a live theory handle; `out` must be valid for writes.
 */
enum GptStatus gpt_measurement_vertex(const struct GptTheory *t,
                                      uintptr_t index,
                                      struct GptMeasurement **out);

/**
 * Ideal measurement of the disc at `angle` radians in `[0, 2π)`.
 *
 * # Safety
 * `t` must be a live theory handle; `out` must be valid for writes.
 */
enum GptStatus gpt_measurement_angle(const struct GptTheory *t,
                                     double angle,
                                     struct GptMeasurement **out);

/**
 * Ideal measurement from an address such as `"12:3"` or `"inf:1.5"`, in
 * a theory of its own with the default tolerance.
 *
 * # Safety
 * `addr` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum GptStatus gpt_measurement_parse(const char *addr, struct GptMeasurement **out);

/**
 * # Safety
 * `m` must be null or a handle from this library that has not been freed.
 */
void gpt_measurement_free(struct GptMeasurement *m);

/**
 * Writes effect `x` (0 or 1) as three doubles.
 *
 * # Safety
 * `m` must be a live measurement handle; `out` must hold 3 doubles.
 */
enum GptStatus gpt_measurement_effect(const struct GptMeasurement *m, uintptr_t x, double *out);

/**
 * Landau–Pollak constant `γ` of two measurements of the same theory.
 *
 * # Safety
 * `a` and `b` must be live measurement handles; `out` must be valid for writes.
 */
enum GptStatus gpt_gamma(const struct GptMeasurement *a,
                         const struct GptMeasurement *b,
                         double *out);

/**
 * Preparation bound `-2 log(γ/2)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GptStatus gpt_pur_bound(double gamma, enum GptLogBase base, double *out);

/**
 * Noise `H(E|M)` of the measurement with `n_effects` effects given as
 * `3 * n_effects` doubles, with respect to the ideal measurement `e`.
 *
 * # Safety
 * `e` must be a live measurement handle, `effects` must hold
 * `3 * n_effects` doubles and `out` must be valid for writes.
 */
enum GptStatus gpt_noise(const struct GptMeasurement *e,
                         const double *effects,
                         uintptr_t n_effects,
                         enum GptLogBase base,
                         double *out);

/**
 * Decides joint measurability. When feasible and `joint` is non-null, a
 * witness joint measurement is stored there.
 *
 * # Safety
 * `a` and `b` must be live measurement handles, `verdict` valid for writes,
 * `joint` null or valid for writes.
 */
enum GptStatus gpt_joint_feasible(const struct GptMeasurement *a,
                                  const struct GptMeasurement *b,
                                  enum GptVerdict *verdict,
                                  struct GptJoint **joint);

/**
 * Minimises the noise sum over joint measurements. Zero `restarts` or
 * `max_iters` select the defaults. When `joint` is non-null the best joint
 * measurement is stored there.
 *
 * # Safety
 * `a` and `b` must be live measurement handles, `noise_sum_out` valid for
 * writes, `joint` null or valid for writes.
 */
enum GptStatus gpt_optimize(const struct GptMeasurement *a,
                            const struct GptMeasurement *b,
                            uintptr_t restarts,
                            uintptr_t max_iters,
                            uint64_t seed,
                            enum GptLogBase base,
                            double *noise_sum_out,
                            struct GptJoint **joint);

/**
 * Writes cell `(x, y)` as three doubles.
 *
 * # Safety
 * `j` must be a live joint handle; `out` must hold 3 doubles.
 */
enum GptStatus gpt_joint_cell(const struct GptJoint *j, uintptr_t x, uintptr_t y, double *out);

/**
 * `N(M^A; A) + N(M^B; B)` for a joint measurement.
 *
 * # Safety
 * All handles must be live; `out` must be valid for writes.
 */
enum GptStatus gpt_joint_noise_sum(const struct GptJoint *j,
                                   const struct GptMeasurement *a,
                                   const struct GptMeasurement *b,
                                   enum GptLogBase base,
                                   double *out);

/**
 * # Safety
 * `j` must be null or a handle from this library that has not been freed.
 */
void gpt_joint_free(struct GptJoint *j);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GPTLAB_H */
