#ifndef DPCERT_H
#define DPCERT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum DpcertError {
  DPCERT_ERROR_OK = 0,
  DPCERT_ERROR_NULL_POINTER = 1,
  DPCERT_ERROR_INVALID_UTF8 = 2,
  DPCERT_ERROR_INVALID_ARGUMENT = 3,
  DPCERT_ERROR_UNKNOWN_LEMMA = 4,
  DPCERT_ERROR_MISSING_FIXTURE = 5,
  DPCERT_ERROR_COMPUTATION = 6,
  DPCERT_ERROR_PANIC = 7,
} DpcertError;

/**
 * Verdict of one lemma.
 */
typedef enum DpcertStatus {
  DPCERT_STATUS_PASS = 0,
  DPCERT_STATUS_FAIL = 1,
  DPCERT_STATUS_NOTE = 2,
} DpcertStatus;

/**
 * Opaque engine handle. Caches the symbolic objects between calls.
 */
typedef struct DpcertEngine DpcertEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, static storage.
 */
const char *dpcert_version(void);

/**
 * Message for the last failing call on this thread, or null. Valid until
 * the next call into the library from the same thread.
 */
const char *dpcert_last_error(void);

/**
 * Creates an engine. `fixtures_dir` may be null to skip printed-display
 * comparisons; `sample_count` 0 selects the default of 100.
 *
 * # Safety
 * `fixtures_dir` must be null or a valid C string; `out` must be writable.
 */
enum DpcertError dpcert_engine_new(uint32_t sample_count,
                                   uint64_t seed,
                                   const char *fixtures_dir,
                                   struct DpcertEngine **out);

/**
 * # Safety
 * `engine` must be null or a pointer from [`dpcert_engine_new`] not yet freed.
 */
void dpcert_engine_free(struct DpcertEngine *engine);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void dpcert_string_free(char *s);

/**
 * Runs one lemma (id or alias). Writes its verdict to `status` and, when
 * `report_json` is non-null, the JSON report (free with
 * [`dpcert_string_free`]).
 *
 * # Safety
 * `engine` must be live, `lemma_id` a valid C string, `status` writable and
 * `report_json` null or writable.
 */
enum DpcertError dpcert_verify_lemma(const struct DpcertEngine *engine,
                                     const char *lemma_id,
                                     enum DpcertStatus *status,
                                     char **report_json);

/**
 * Exact value of `what` (V, F1, F2, A, B, C, calA) at a comma-separated
 * rational point of chart `k2` or `k3`, as text.
 *
 * # Safety
 * All string arguments must be valid C strings; `out` must be writable.
 */
enum DpcertError dpcert_eval(const char *chart, const char *point, const char *what, char **out);

/**
 * Isolating interval of the k=2 critical point at width `width` (`p/q`).
 * Endpoints are returned as `p/q` strings.
 *
 * # Safety
 * `engine` must be live, `width` a valid C string, `lo`/`hi` writable.
 */
enum DpcertError dpcert_isolate_k2(const struct DpcertEngine *engine,
                                   const char *width,
                                   char **lo,
                                   char **hi);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DPCERT_H */
