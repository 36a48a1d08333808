#ifndef GCX_H
#define GCX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum GcxStatus {
  GCX_STATUS_OK = 0,
  GCX_STATUS_NULL_POINTER = 1,
  GCX_STATUS_INVALID_ARGUMENT = 2,
  GCX_STATUS_DIMENSION_MISMATCH = 3,
  GCX_STATUS_NOT_PURE = 4,
  GCX_STATUS_DEGENERATE = 5,
  GCX_STATUS_PARSE = 6,
  GCX_STATUS_INTERNAL = 7,
  GCX_STATUS_PANIC = 8,
} GcxStatus;

/**
 * Opaque mixed-degree complex form.
 */
typedef struct GcxMultiform GcxMultiform;

/**
 * A complex number.
 */
typedef struct GcxComplex {
  double re;
  double im;
} GcxComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates the zero form in dimension `dim` (2 to 4).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum GcxStatus gcx_multiform_new(size_t dim, struct GcxMultiform **out);

/**
 * Parses a form from JSON: `{"dim": 4, "terms": [{"indices": [1, 2], "re": 1, "im": 0}]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid for writes.
 */
enum GcxStatus gcx_multiform_from_json(const char *json, struct GcxMultiform **out);

/**
 * Serializes a form to JSON.
 *
 * # Safety
 * `form` must be a live handle and `out` valid for writes.
 */
enum GcxStatus gcx_multiform_to_json(const struct GcxMultiform *form, char **out);

/**
 * Sets the coefficient of the basis element `mask`.
 *
 * # Safety
 * `form` must be a live handle.
 */
enum GcxStatus gcx_multiform_set(struct GcxMultiform *form, uint32_t mask, struct GcxComplex value);

/**
 * Reads the coefficient of the basis element `mask`.
 *
 * # Safety
 * `form` must be a live handle and `out` valid for writes.
 */
enum GcxStatus gcx_multiform_get(const struct GcxMultiform *form,
                                 uint32_t mask,
                                 struct GcxComplex *out);

/**
 * Dimension of the underlying space, 0 for a null handle.
 *
 * # Safety
 * `form` must be null or a live handle.
 */
size_t gcx_multiform_dim(const struct GcxMultiform *form);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `form` must be null or a handle not yet freed.
 */
void gcx_multiform_free(struct GcxMultiform *form);

/**
 * Clifford action `v · rho = ι_X rho + ξ ∧ rho`, written to a new handle.
 *
 * # Safety
 * `v` must point to `len` values, `rho` must be a live handle and `out`
 * valid for writes.
 */
enum GcxStatus gcx_clifford(const struct GcxComplex *v,
                            size_t len,
                            const struct GcxMultiform *rho,
                            struct GcxMultiform **out);

/**
 * Pairing `⟨u, v⟩ = ½(ξ(Y) + η(X))` of two generalized vectors of length `len`.
 *
 * # Safety
 * `u` and `v` must point to `len` values and `out` be valid for writes.
 */
enum GcxStatus gcx_pairing(const struct GcxComplex *u,
                           const struct GcxComplex *v,
                           size_t len,
                           struct GcxComplex *out);

/**
 * Purity test: the annihilator of `rho` is maximal isotropic.
 *
 * # Safety
 * `rho` must be a live handle and `out` valid for writes.
 */
enum GcxStatus gcx_is_pure(const struct GcxMultiform *rho, double tol, bool *out);

/**
 * Normal form `c e^(B + iω) Ω` of a pure spinor, as JSON.
 *
 * # Safety
 * `rho` must be a live handle and `out` valid for writes.
 */
enum GcxStatus gcx_normal_form_json(const struct GcxMultiform *rho, char **out);

/**
 * Runs a check group (`algebra`, `local-model`, `surgery`, `quotient`,
 * `locus`, `bfield` or `all`) and returns the reports as a JSON array.
 * A failing check is not an error: inspect `all_pass`.
 *
 * # Safety
 * `group` must be a NUL-terminated string, `out_json` and `all_pass`
 * valid for writes.
 */
enum GcxStatus gcx_run_check(const char *group,
                             uint64_t seed,
                             size_t samples,
                             char **out_json,
                             bool *all_pass);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void gcx_string_free(char *s);

/**
 * Message of the last failed call on this thread, empty after a success.
 * Valid until the next call on the same thread.
 */
const char *gcx_last_error(void);

/**
 * Library version, a static string.
 */
const char *gcx_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GCX_H */
