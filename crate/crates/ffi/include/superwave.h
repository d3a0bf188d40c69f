#ifndef SUPERWAVE_H
#define SUPERWAVE_H

#pragma once

/* Generated by cbindgen from superwave-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Evaluation mode for checks.
typedef enum SwvMode {
  SWV_MODE_EXACT = 0,
  SWV_MODE_GRID = 1,
} SwvMode;

// Status codes shared with the command line exit codes.
typedef enum SwvStatus {
  SWV_STATUS_OK = 0,
  SWV_STATUS_CHECK_FAILED = 1,
  SWV_STATUS_INVALID_INPUT = 2,
  SWV_STATUS_MODE_UNSUPPORTED = 3,
  SWV_STATUS_NULL_POINTER = 4,
  SWV_STATUS_PANIC = 5,
} SwvStatus;

// Opaque check report handle.
typedef struct SwvReport SwvReport;

// Opaque wavelet system handle.
typedef struct SwvSystem SwvSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Most recent error message on this thread, or NULL. Free with
// `swv_string_free`.
char *swv_last_error(void);

// Frees a string returned by this library.
void swv_string_free(char *text);

// Parses a system document (JSON) into a handle.
//
// # Safety
// `json` must be a valid NUL-terminated string; `out` a valid pointer.
enum SwvStatus swv_system_parse_json(const char *json, struct SwvSystem **out);

// Builds a named builtin system (see the CLI `--builtin` names).
//
// # Safety
// `name` must be a valid NUL-terminated string; `out` a valid pointer.
enum SwvStatus swv_system_builtin(const char *name, struct SwvSystem **out);

// Serializes the system document. Free with `swv_string_free`.
//
// # Safety
// `system` must be a live handle from this library.
char *swv_system_to_json(const struct SwvSystem *system);

// Releases a system handle.
//
// # Safety
// `system` must be NULL or a live handle; it is invalid afterwards.
void swv_system_free(struct SwvSystem *system);

// Validates the structure of a system: `Ok` when all invariants hold,
// `CheckFailed` otherwise (details in `swv_last_error`).
//
// # Safety
// `system` must be a live handle.
enum SwvStatus swv_validate_structure(const struct SwvSystem *system);

// Runs the super-wavelet characterization check. On success or check
// failure, `out_report` (when non-NULL) receives a report handle.
//
// # Safety
// `system` must be a live handle; `out_report` NULL or a valid pointer.
enum SwvStatus swv_check_wavelet(const struct SwvSystem *system,
                                 enum SwvMode mode,
                                 struct SwvReport **out_report);

// Strong disjointness of two scalar systems over the same scale.
//
// # Safety
// `first` and `second` must be live handles; `out_report` NULL or valid.
enum SwvStatus swv_check_disjoint(const struct SwvSystem *first,
                                  const struct SwvSystem *second,
                                  enum SwvMode mode,
                                  struct SwvReport **out_report);

// Builds the p-fold oversampled super-wavelet system from a scalar system.
//
// # Safety
// `system` must be a live handle; `out` a valid pointer.
enum SwvStatus swv_oversample(const struct SwvSystem *system, uint32_t p, struct SwvSystem **out);

// The oversampling offset-set identity for `|q| <= q_bound`.
enum SwvStatus swv_offset_set_check(uint32_t scale, uint32_t p, int64_t q_bound);

// Whether the checked equations held.
//
// # Safety
// `report` must be a live handle.
bool swv_report_passed(const struct SwvReport *report);

// Largest residual over all evaluations.
//
// # Safety
// `report` must be a live handle.
double swv_report_max_residual(const struct SwvReport *report);

// Number of evaluated cells (or grid points).
//
// # Safety
// `report` must be a live handle.
uint64_t swv_report_cells_checked(const struct SwvReport *report);

// JSON form of the report (`passed`, `mode`, `max_residual`, `witness`,
// `cells_checked`). Free with `swv_string_free`.
//
// # Safety
// `report` must be a live handle.
char *swv_report_to_json(const struct SwvReport *report);

// Releases a report handle.
//
// # Safety
// `report` must be NULL or a live handle; it is invalid afterwards.
void swv_report_free(struct SwvReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUPERWAVE_H */
