#ifndef SIGMAPQ_H
#define SIGMAPQ_H

/* Generated by cbindgen from the sigmapq-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum SigmapqStatus {
  SIGMAPQ_STATUS_OK = 0,
  SIGMAPQ_STATUS_NULL_POINTER = 1,
  SIGMAPQ_STATUS_INVALID_ARGUMENT = 2,
  SIGMAPQ_STATUS_VERIFICATION_FAILED = 3,
  SIGMAPQ_STATUS_UNRESOLVED = 4,
  SIGMAPQ_STATUS_INTERNAL_ERROR = 5,
} SigmapqStatus;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *sigmapq_version(void);

/**
 * Release a string returned by this library. NULL is accepted.
 *
 * # Safety
 *
 * `s` must be NULL or a pointer previously returned by this library and
 * not yet freed; passing anything else is undefined behaviour.
 */
void sigmapq_string_free(char *s);

/**
 * Placeholder until the pipeline lands; proves the FFI toolchain.
 *
 * # Safety
 *
 * `out` must be NULL or a valid pointer to writable `*mut c_char` storage.
 */
enum SigmapqStatus sigmapq_ping_json(char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIGMAPQ_H */
