#ifndef XFREE_H
#define XFREE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum XfStatus {
  XF_STATUS_OK = 0,
  XF_STATUS_NULL_POINTER = 1,
  XF_STATUS_UTF8 = 2,
  XF_STATUS_PARSE = 3,
  XF_STATUS_PRECONDITION = 4,
  XF_STATUS_BUDGET = 5,
  XF_STATUS_INVALID_ARGUMENT = 6,
  XF_STATUS_IO = 7,
  XF_STATUS_OVERFLOW = 8,
  XF_STATUS_PANIC = 9,
} XfStatus;

/**
 * Opaque handle to a subset of `[n]^d`.
 */
typedef struct XfGridSet XfGridSet;

/**
 * Opaque pattern handle.
 */
typedef struct XfPattern XfPattern;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *xf_last_error(void);

/**
 * Parses a pattern from the text format (`d k` header, then points).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum XfStatus xf_pattern_parse(const char *text, struct XfPattern **out);

/**
 * The progression `{0, 1, …, k − 1}`.
 *
 * # Safety
 * `out` must be writable.
 */
enum XfStatus xf_pattern_progression(size_t k, struct XfPattern **out);

/**
 * The corner `{0, e_1, …, e_d}`.
 *
 * # Safety
 * `out` must be writable.
 */
enum XfStatus xf_pattern_corner(size_t d, struct XfPattern **out);

/**
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void xf_pattern_free(struct XfPattern *p);

/**
 * Number of points, or 0 for null.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t xf_pattern_size(const struct XfPattern *p);

/**
 * Dimension, or 0 for null.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t xf_pattern_dim(const struct XfPattern *p);

/**
 * An empty subset of `[n]^d`, or the full grid when `full` is nonzero.
 *
 * # Safety
 * `out` must be writable.
 */
enum XfStatus xf_gridset_new(uint64_t n, size_t d, int32_t full, struct XfGridSet **out);

/**
 * Inserts the point `coords[0..d]` (1-based coordinates).
 *
 * # Safety
 * `set` must be a live handle and `coords` must point to `d` integers.
 */
enum XfStatus xf_gridset_insert(struct XfGridSet *set, const int64_t *coords);

/**
 * Number of points, or 0 for null.
 *
 * # Safety
 * `set` must be null or a live handle.
 */
uint64_t xf_gridset_len(const struct XfGridSet *set);

/**
 * Nonzero iff the point `coords[0..d]` is in the set.
 *
 * # Safety
 * `set` must be a live handle and `coords` must point to `d` integers.
 */
int32_t xf_gridset_contains(const struct XfGridSet *set, const int64_t *coords);

/**
 * # Safety
 * `set` must come from this library and not be used afterwards.
 */
void xf_gridset_free(struct XfGridSet *set);

/**
 * `Γ_X(A)`, the number of copies of the pattern inside the set.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum XfStatus xf_gamma_count(const struct XfGridSet *set, const struct XfPattern *p, uint64_t *out);

/**
 * Bounds on `r_X(n)`. `exact` is set to 1 when `lower == upper` was
 * proven; a `node_budget` of 0 uses the default.
 *
 * # Safety
 * `p` must be live; the output pointers must be writable.
 */
enum XfStatus xf_solve_rx(const struct XfPattern *p,
                          uint64_t n,
                          size_t workers,
                          uint64_t node_budget,
                          uint64_t *lower,
                          uint64_t *upper,
                          int32_t *exact);

/**
 * Number of X-free subsets of `[n]^d` as a decimal string, to be released
 * with [`xf_string_free`].
 *
 * # Safety
 * `p` must be live; `out` must be writable.
 */
enum XfStatus xf_count_free(const struct XfPattern *p, uint64_t n, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void xf_string_free(char *s);

/**
 * `π(l)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum XfStatus xf_prime_pi(uint64_t l, uint64_t *out);

/**
 * Checks `π(ℓ) ≥ ℓ/(2 ln ℓ)` on `[l0, lmax]`. On failure `first_violation`
 * receives the first bad `ℓ`, otherwise 0.
 *
 * # Safety
 * Output pointers must be writable.
 */
enum XfStatus xf_verify_pnt(uint64_t l0, uint64_t lmax, int32_t *holds, uint64_t *first_violation);

/**
 * The sphere-shell set in `[n]` free of the triple `{a, b, c}`.
 *
 * # Safety
 * `out` must be writable.
 */
enum XfStatus xf_behrend_1d(int64_t a, int64_t b, int64_t c, uint64_t n, struct XfGridSet **out);

/**
 * `Δ(H,τ)` from co-degrees `Δ_2..Δ_k` (`len = k − 1`) and the average
 * degree.
 *
 * # Safety
 * `codegrees` must point to `len` doubles; `out` must be writable.
 */
enum XfStatus xf_delta_tau(const double *codegrees,
                           size_t len,
                           double avg_degree,
                           double tau,
                           double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XFREE_H */
