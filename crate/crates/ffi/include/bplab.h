#ifndef BPLAB_H
#define BPLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes of every exported function.
typedef enum BpStatus {
  BP_STATUS_OK = 0,
  BP_STATUS_NULL_POINTER = 1,
  BP_STATUS_INVALID_UTF8 = 2,
  BP_STATUS_INVALID_ARGUMENT = 3,
  BP_STATUS_INVALID_BODY = 4,
  BP_STATUS_UNSUPPORTED = 5,
  BP_STATUS_NUMERICAL = 6,
  BP_STATUS_CONFIG = 7,
  BP_STATUS_IO = 8,
  BP_STATUS_INTERNAL = 9,
} BpStatus;

// Opaque body handle.
typedef struct BpBody BpBody;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *bp_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *bp_version(void);

// Parses a body from its JSON description.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum BpStatus bp_body_from_json(const char *json, struct BpBody **out);

// Releases a handle; NULL is ignored.
//
// # Safety
// `body` must come from `bp_body_from_json` and not be used afterwards.
void bp_body_free(struct BpBody *body);

// Serializes the body back to JSON; free the result with `bp_string_free`.
//
// # Safety
// `body` must be a live handle; `out` must be writable.
enum BpStatus bp_body_to_json(const struct BpBody *body, char **out);

// Ambient dimension kappa * n of the body.
//
// # Safety
// `body` must be a live handle; `out` must be writable.
enum BpStatus bp_body_dim(const struct BpBody *body, uintptr_t *out);

// Gauge of the body at `x[0..len]`.
//
// # Safety
// `x` must point to `len` doubles; `out` must be writable.
enum BpStatus bp_body_gauge(const struct BpBody *body, const double *x, uintptr_t len, double *out);

// Volume by the polar formula with `samples` seeded directions.
//
// # Safety
// `value` and `std_error` must be writable.
enum BpStatus bp_body_volume(const struct BpBody *body,
                             uintptr_t samples,
                             uint64_t seed,
                             double *value,
                             double *std_error);

// Volume of the central section by H_xi, the complement of the rotation
// orbit of `xi[0..len]`.
//
// # Safety
// `xi` must point to `len` doubles; `value` and `std_error` must be writable.
enum BpStatus bp_section_volume(const struct BpBody *body,
                                const double *xi,
                                uintptr_t len,
                                uintptr_t samples,
                                uint64_t seed,
                                double *value,
                                double *std_error);

// Fourier transform of |x|_D^{-p} at the unit direction `xi`, by the route
// the layout supports for p.
//
// # Safety
// `xi` must point to `len` doubles; `value` and `std_error` must be writable.
enum BpStatus bp_fourier_value(const struct BpBody *body,
                               const double *xi,
                               uintptr_t len,
                               double exponent,
                               uintptr_t samples,
                               uint64_t seed,
                               double *value,
                               double *std_error);

// Runs an experiment config (JSON text) and returns the suite report as
// JSON. Body files resolve against the current directory; nothing is
// written to disk. `exit_code` receives 0 (pass), 2 (fail) or 3
// (inconclusive).
//
// # Safety
// `config_json` must be NUL-terminated; `report_json` and `exit_code` must
// be writable.
enum BpStatus bp_run_config(const char *config_json, char **report_json, int32_t *exit_code);

// Releases a string returned by this library; NULL is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void bp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BPLAB_H */
