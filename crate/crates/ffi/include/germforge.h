#ifndef GERMFORGE_H
#define GERMFORGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; the nonzero values match the command-line exit codes.
 */
typedef enum GfStatus {
  GF_STATUS_OK = 0,
  GF_STATUS_NULL_ARGUMENT = 1,
  GF_STATUS_PARSE = 2,
  GF_STATUS_VALIDATION = 3,
  GF_STATUS_INCONCLUSIVE = 4,
  GF_STATUS_INTERNAL = 5,
} GfStatus;

/**
 * Opaque validated family in prenormal presentation.
 */
typedef struct GfFamily GfFamily;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message on this thread, or an empty string.
 */
const char *gf_last_error(void);

const char *gf_version(void);

/**
 * Parses `<x-expr> ; <y-expr>` at total degree `trunc`; `xi_form != 0`
 * reads `xi ; psi` instead.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GfStatus gf_family_parse(const char *text, int xi_form, uint32_t trunc, struct GfFamily **out);

/**
 * Normal form of a named class at total degree `trunc`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GfStatus gf_family_from_class(const char *name, uint32_t trunc, struct GfFamily **out);

/**
 * # Safety
 * `family` must come from this library and not be used afterwards.
 */
void gf_family_free(struct GfFamily *family);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void gf_string_free(char *s);

/**
 * `phi` of the presentation `(xi + t, phi)`.
 *
 * # Safety
 * `family` must be a live handle and `out` a valid pointer.
 */
enum GfStatus gf_prenormal(const struct GfFamily *family, char **out);

/**
 * Classification report as JSON.
 *
 * # Safety
 * `family` must be a live handle and `out` a valid pointer.
 */
enum GfStatus gf_classify_json(const struct GfFamily *family, uint32_t max_jet, char **out);

/**
 * Class name only, e.g. `S1,2`.
 *
 * # Safety
 * `family` must be a live handle and `out` a valid pointer.
 */
enum GfStatus gf_classify_name(const struct GfFamily *family, uint32_t max_jet, char **out);

/**
 * Exact envelope branches as JSON.
 *
 * # Safety
 * `family` must be a live handle and `out` a valid pointer.
 */
enum GfStatus gf_envelope_json(const struct GfFamily *family, char **out);

/**
 * Stable codimension and tangential codimension. The handle's
 * truncation must reach a stable degree (class handles are rebuilt).
 *
 * # Safety
 * `family` must be a live handle; `codim` and `tang_codim` valid pointers.
 */
enum GfStatus gf_codim(const struct GfFamily *family, uint32_t *codim, uint32_t *tang_codim);

/**
 * `*out = 1` when `from` is adjacent to `to` (transitively), else 0.
 *
 * # Safety
 * `from`, `to` must be NUL-terminated strings and `out` a valid pointer.
 */
enum GfStatus gf_adjacent(const char *from, const char *to, int *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GERMFORGE_H */
