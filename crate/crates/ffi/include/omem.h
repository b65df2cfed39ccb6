#ifndef OMEM_H
#define OMEM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. The nonzero values 2–4 match the CLI exit codes.
 */
typedef enum OmemStatus {
  OMEM_STATUS_OK = 0,
  /**
   * Null pointer or text that is not UTF-8.
   */
  OMEM_STATUS_INVALID_ARGUMENT = 1,
  OMEM_STATUS_CONFIG = 2,
  OMEM_STATUS_UNSTABLE = 3,
  OMEM_STATUS_NUMERICAL = 4,
  OMEM_STATUS_PANIC = 5,
} OmemStatus;

/**
 * Opaque scenario handle.
 */
typedef struct OmemScenario OmemScenario;

/**
 * Result of one protocol evaluation.
 */
typedef struct OmemFidelity {
  double fidelity;
  double n_h;
  double lambda;
  /**
   * Rotation angle removed before comparing, radians.
   */
  double theta;
  /**
   * Pulse length, seconds.
   */
  double t_s;
  /**
   * Storage time, seconds.
   */
  double tau;
} OmemFidelity;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a scenario from configuration text, e.g. `"preset = teufel"`.
 * On success `*out` owns a handle to release with [`omem_scenario_free`].
 *
 * # Safety
 * `config` must be a NUL-terminated string and `out` a valid pointer.
 */
enum OmemStatus omem_scenario_new(const char *config, struct OmemScenario **out);

/**
 * Sets one key, e.g. `("GammaL", "1 kHz")`. The handle is unchanged if the
 * new value does not resolve.
 *
 * # Safety
 * `handle` must come from [`omem_scenario_new`]; `key` and `value` must be
 * NUL-terminated strings.
 */
enum OmemStatus omem_scenario_set(struct OmemScenario *handle, const char *key, const char *value);

/**
 * Runs write, store and read and reports the fidelity.
 *
 * # Safety
 * `handle` must come from [`omem_scenario_new`] and `out` be valid.
 */
enum OmemStatus omem_scenario_fidelity(const struct OmemScenario *handle, struct OmemFidelity *out);

/**
 * Copies the resolved configuration text into `buf`. Returns the length
 * needed including the terminating NUL; nothing is written if `len` is too
 * small. Returns 0 for a null handle.
 *
 * # Safety
 * `buf` must point to `len` writable bytes (or be null with `len == 0`).
 */
size_t omem_scenario_dump(const struct OmemScenario *handle, char *buf, size_t len);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `handle` must come from [`omem_scenario_new`] and not be used afterwards.
 */
void omem_scenario_free(struct OmemScenario *handle);

/**
 * Copies this thread's last error message; same length contract as
 * [`omem_scenario_dump`].
 *
 * # Safety
 * `buf` must point to `len` writable bytes (or be null with `len == 0`).
 */
size_t omem_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *omem_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OMEM_H */
