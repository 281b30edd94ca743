#ifndef PFIBER_H
#define PFIBER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every entry point.
 */
typedef enum PfStatus {
  PF_STATUS_OK = 0,
  PF_STATUS_NULL_POINTER = 1,
  PF_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed word, braid, JSON or option.
   */
  PF_STATUS_INVALID_INPUT = 3,
  /**
   * Root finding, tracking or projection broke down.
   */
  PF_STATUS_NUMERICAL = 4,
  PF_STATUS_IO = 5,
  PF_STATUS_PANIC = 6,
} PfStatus;

/**
 * Opaque parametrized braid.
 */
typedef struct PfBraid PfBraid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy of the last error message on this thread, or NULL if the last call
 * succeeded. Free with `pf_string_free`.
 */
char *pf_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void pf_string_free(char *s);

/**
 * # Safety
 * `b` must be NULL or a handle returned by this library and not yet freed.
 */
void pf_braid_free(struct PfBraid *b);

/**
 * Built-in braid by name: `hopf`, `trefoil_neg`, `figure8`, `sigma1_2strand`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum PfStatus pf_braid_library(const char *name, struct PfBraid **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum PfStatus pf_braid_from_json(const char *json, struct PfBraid **out);

/**
 * # Safety
 * `b` must be a live handle and `out` a writable pointer.
 */
enum PfStatus pf_braid_to_json(const struct PfBraid *b, char **out);

/**
 * Total strand count, or 0 for a NULL handle.
 *
 * # Safety
 * `b` must be NULL or a live handle.
 */
size_t pf_braid_strands(const struct PfBraid *b);

/**
 * The braid followed by `k` full twists.
 *
 * # Safety
 * `b` must be a live handle and `out` a writable pointer.
 */
enum PfStatus pf_braid_twist(const struct PfBraid *b, int64_t k, struct PfBraid **out);

/**
 * The `r`-th power of the braid.
 *
 * # Safety
 * `b` must be a live handle and `out` a writable pointer.
 */
enum PfStatus pf_braid_power(const struct PfBraid *b, int64_t r, struct PfBraid **out);

/**
 * Satellite of `pattern` with one companion and one power per pattern component.
 *
 * # Safety
 * `companions` and `powers` must each point to `count` readable elements, and
 * every companion must be a live handle.
 */
enum PfStatus pf_braid_satellite(const struct PfBraid *pattern,
                                 const struct PfBraid *const *companions,
                                 const int64_t *powers,
                                 size_t count,
                                 double eps,
                                 struct PfBraid **out);

/**
 * Fibration check. `passed` receives the verdict. When `report` is not NULL
 * it receives the JSON report, to be freed with `pf_string_free`.
 *
 * # Safety
 * `b` must be a live handle, `passed` writable, `report` NULL or writable.
 */
enum PfStatus pf_check(const struct PfBraid *b,
                       size_t grid,
                       double margin,
                       bool *passed,
                       char **report);

/**
 * Braid word read off the parametrization, as signed generator indices
 * separated by spaces.
 *
 * # Safety
 * `b` must be a live handle and `out` a writable pointer.
 */
enum PfStatus pf_extract_word(const struct PfBraid *b, size_t grid, char **out);

/**
 * Alternating homogeneous word on `2 * strands` strands.
 *
 * # Safety
 * `word` must be a NUL-terminated string and `out` a writable pointer.
 */
enum PfStatus pf_homogenize(const char *word, size_t strands, char **out);

/**
 * Full twist counts in each direction that make the closure fibered.
 *
 * # Safety
 * `word` must be a NUL-terminated string; `positive` and `negative` writable.
 */
enum PfStatus pf_twist_bound(const char *word,
                             size_t strands,
                             uint64_t *positive,
                             uint64_t *negative);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PFIBER_H */
