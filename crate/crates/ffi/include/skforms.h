#ifndef SKFORMS_H
#define SKFORMS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SkStatus {
  SK_STATUS_OK = 0,
  SK_STATUS_NOT_EIGENFORM = 2,
  SK_STATUS_PRECISION = 3,
  SK_STATUS_INVALID_ARGUMENT = 4,
  SK_STATUS_INTERNAL = 5,
  SK_STATUS_NULL_POINTER = 6,
  SK_STATUS_IO = 7,
  SK_STATUS_PANIC = 8,
} SkStatus;

/**
 * Opaque degree-2 expansion.
 */
typedef struct SkExpansion SkExpansion;

/**
 * Opaque elliptic eigenform.
 */
typedef struct SkNewform SkNewform;

/**
 * Content L, conductor M, fundamental discriminant d and the reduced
 * representative (n, r, m) of the attached primitive class.
 */
typedef struct SkDecomposition {
  int64_t content;
  int64_t conductor;
  int64_t disc;
  int64_t rep_n;
  int64_t rep_r;
  int64_t rep_m;
} SkDecomposition;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *sk_last_error(void);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void sk_string_free(char *s);

/**
 * Builds the Saito–Kurokawa lift (weight 10 or 12) or the Siegel
 * Eisenstein series (weight 4 or 6) on det4 ≤ `detmax4`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SkStatus sk_expansion_new(uint32_t weight, uint64_t detmax4, struct SkExpansion **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SkStatus sk_expansion_load(const char *path, struct SkExpansion **out);

/**
 * # Safety
 * `f` must be a live handle and `path` a NUL-terminated string.
 */
enum SkStatus sk_expansion_save(const struct SkExpansion *f, const char *path);

/**
 * # Safety
 * `f` must come from this library, or be null.
 */
void sk_expansion_free(struct SkExpansion *f);

/**
 * Weight of the expansion, or 0 for a null handle.
 *
 * # Safety
 * `f` must be a live handle or null.
 */
uint32_t sk_expansion_weight(const struct SkExpansion *f);

/**
 * # Safety
 * `f` must be a live handle or null.
 */
uint64_t sk_expansion_detmax4(const struct SkExpansion *f);

/**
 * a(T) for T = (n, r, m) as a rational string.
 *
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum SkStatus sk_expansion_coeff(const struct SkExpansion *f,
                                 int64_t n,
                                 int64_t r,
                                 int64_t m,
                                 char **out);

/**
 * The T(p) eigenvalue, checked on the whole output region.
 *
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum SkStatus sk_hecke_eigenvalue(const struct SkExpansion *f, uint64_t p, char **out);

/**
 * The level one newform of weight 12, 16, 18, 20, 22 or 26.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SkStatus sk_newform_new(uint32_t weight, size_t precision, struct SkNewform **out);

/**
 * # Safety
 * `f` must come from this library, or be null.
 */
void sk_newform_free(struct SkNewform *f);

/**
 * a_f(n) as a decimal string.
 *
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum SkStatus sk_newform_coeff(const struct SkNewform *f, uint64_t n, char **out);

/**
 * Cohen's number H(r, n) as a rational string.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SkStatus sk_cohen_h(uint32_t r, uint64_t n, char **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum SkStatus sk_decompose(int64_t n, int64_t r, int64_t m, struct SkDecomposition *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKFORMS_H */
