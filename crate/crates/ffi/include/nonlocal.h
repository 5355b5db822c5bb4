#ifndef NONLOCAL_H
#define NONLOCAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum NlStatus {
  NL_STATUS_OK = 0,
  NL_STATUS_NULL_POINTER = 1,
  NL_STATUS_INVALID_INPUT = 2,
  NL_STATUS_SOLVER_FAILURE = 3,
  NL_STATUS_PANIC = 4,
} NlStatus;

/**
 * Opaque correlation box.
 */
typedef struct NlBox NlBox;

/**
 * Opaque Bell functional.
 */
typedef struct NlFunctional NlFunctional;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *nl_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nl_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void nl_string_free(char *s);

/**
 * Parses `{"m","n","p"}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum NlStatus nl_box_from_json(const char *json, struct NlBox **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum NlStatus nl_box_pr(struct NlBox **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum NlStatus nl_box_isotropic(double v, struct NlBox **out);

/**
 * # Safety
 * `b` must be a live handle; `out` must be writable.
 */
enum NlStatus nl_box_to_json(const struct NlBox *b, char **out);

/**
 * # Safety
 * `b` must be null or a handle from this library, not yet freed.
 */
void nl_box_free(struct NlBox *b);

/**
 * Parses `{"m","n","t"}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum NlStatus nl_functional_from_json(const char *json, struct NlFunctional **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum NlStatus nl_functional_chsh(struct NlFunctional **out);

/**
 * # Safety
 * `f` must be null or a handle from this library, not yet freed.
 */
void nl_functional_free(struct NlFunctional *f);

/**
 * # Safety
 * `f` must be a live handle; `value` must be writable.
 */
enum NlStatus nl_classical_bound(const struct NlFunctional *f, double *value);

/**
 * Certified upper bound over boxes with a level-`level` NPA certificate.
 *
 * # Safety
 * `f` must be a live handle; `value` must be writable.
 */
enum NlStatus nl_npa_bound(const struct NlFunctional *f, uintptr_t level, double *value);

/**
 * Quantum lower bound from see-saw optimization in local dimensions
 * `d_a × d_b`.
 *
 * # Safety
 * `f` must be a live handle; `value` must be writable.
 */
enum NlStatus nl_see_saw(const struct NlFunctional *f,
                         uintptr_t d_a,
                         uintptr_t d_b,
                         uintptr_t restarts,
                         uint64_t seed,
                         double *value);

/**
 * # Safety
 * `f`, `b` must be live handles; `value` must be writable.
 */
enum NlStatus nl_evaluate(const struct NlFunctional *f, const struct NlBox *b, double *value);

/**
 * # Safety
 * `b` must be a live handle; outputs must be writable.
 */
enum NlStatus nl_nonsignalling(const struct NlBox *b, double tol, bool *ok, double *violation);

/**
 * # Safety
 * `b` must be a live handle; `member` must be writable.
 */
enum NlStatus nl_lhv_member(const struct NlBox *b, bool *member);

/**
 * # Safety
 * `b` must be a live handle; outputs must be writable.
 */
enum NlStatus nl_npa_feasible(const struct NlBox *b,
                              uintptr_t level,
                              double tol,
                              bool *feasible,
                              double *margin);

/**
 * Positivity of a cube element given as `{"m","n","re","im"}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `positive` must be writable.
 */
enum NlStatus nl_cube_is_positive(const char *json, bool *positive);

/**
 * LHS bound and quantum bound of a steering functional `{"m","n","d","F"}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; outputs must be writable.
 */
enum NlStatus nl_steering_bounds(const char *json, double *lhs, double *quantum);

/**
 * LHS membership of an assemblage `{"m","n","d","sigma"}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `member` must be writable.
 */
enum NlStatus nl_lhs_member(const char *json, double tol, bool *member);

/**
 * Approximates a canonical two-qubit realization `{"psi","alpha","beta"}`
 * and writes `{"N","k0","l0","distance","box",…}` as JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `result` must be writable.
 */
enum NlStatus nl_approximate(const char *json, double eps, char **result);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* NONLOCAL_H */
