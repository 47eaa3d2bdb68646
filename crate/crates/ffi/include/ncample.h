#ifndef NCAMPLE_H
#define NCAMPLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum NcStatus {
  NC_STATUS_OK = 0,
  NC_STATUS_NULL_POINTER = 1,
  NC_STATUS_INVALID_UTF8 = 2,
  /**
   * The document is malformed or describes an invalid system.
   */
  NC_STATUS_INVALID_INPUT = 3,
  /**
   * An argument has the wrong length or value.
   */
  NC_STATUS_INVALID_ARGUMENT = 4,
  /**
   * A result does not fit the output type.
   */
  NC_STATUS_OVERFLOW = 5,
  /**
   * The verdict is undetermined within the search bound.
   */
  NC_STATUS_UNDETERMINED = 6,
  /**
   * The system is decisively not NC-ample.
   */
  NC_STATUS_NOT_NC_AMPLE = 7,
  /**
   * Internal error; the library caught a panic.
   */
  NC_STATUS_PANIC = 8,
} NcStatus;

typedef enum NcVerdictKind {
  NC_VERDICT_KIND_NC_AMPLE = 0,
  NC_VERDICT_KIND_QUASI_UNIPOTENT_FAIL = 1,
  NC_VERDICT_KIND_EVENTUAL_AMPLENESS_FAIL = 2,
  NC_VERDICT_KIND_UNDETERMINED = 3,
} NcVerdictKind;

/**
 * Opaque bimodule system.
 */
typedef struct NcSystem NcSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Owned by the
 * library and valid until the next call on the same thread.
 */
const char *nc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nc_version(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void nc_string_free(char *s);

/**
 * Parses a system document (JSON, NUL-terminated UTF-8).
 *
 * # Safety
 * `json` must be a valid C string and `out` writable.
 */
enum NcStatus nc_system_from_json(const char *json, struct NcSystem **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `sys` must come from this library and not be freed twice.
 */
void nc_system_free(struct NcSystem *sys);

/**
 * Serializes the system back to a JSON document.
 *
 * # Safety
 * `sys` must be a live handle and `out` writable.
 */
enum NcStatus nc_system_to_json(const struct NcSystem *sys, char **out);

/**
 * Number of bimodules `s`.
 *
 * # Safety
 * `sys` must be a live handle and `out` writable.
 */
enum NcStatus nc_system_arity(const struct NcSystem *sys, size_t *out);

/**
 * Picard rank `rho`.
 *
 * # Safety
 * `sys` must be a live handle and `out` writable.
 */
enum NcStatus nc_system_rank(const struct NcSystem *sys, size_t *out);

/**
 * Writes the `rho` coordinates of the class of grade `n` (length `s`) into
 * `out`, which must hold `out_len >= rho` values. Returns `Overflow` when a
 * coordinate does not fit in 64 bits.
 *
 * # Safety
 * `n` must point to `n_len` values and `out` to `out_len` writable values.
 */
enum NcStatus nc_class_at(const struct NcSystem *sys,
                          const uint64_t *n,
                          size_t n_len,
                          int64_t *out,
                          size_t out_len);

/**
 * NC-ampleness verdict. Writes the kind and, if `json_out` is not NULL, a
 * JSON description with the certificate or witness.
 *
 * # Safety
 * `sys` must be a live handle, `kind_out` writable, `json_out` NULL or writable.
 */
enum NcStatus nc_verdict(const struct NcSystem *sys,
                         uint64_t bound,
                         enum NcVerdictKind *kind_out,
                         char **json_out);

/**
 * GK dimension with its bounds `[lower, upper]`. Fails with `NotNcAmple`
 * or `Undetermined` when no certificate exists.
 *
 * # Safety
 * `sys` must be a live handle; the outputs must be writable.
 */
enum NcStatus nc_gk(const struct NcSystem *sys,
                    uint64_t bound,
                    uint32_t *gk_out,
                    uint64_t *lower_out,
                    uint64_t *upper_out);

/**
 * Dual system with inverted twists.
 *
 * # Safety
 * `sys` must be a live handle and `out` writable.
 */
enum NcStatus nc_dual(const struct NcSystem *sys, struct NcSystem **out);

/**
 * Veronese system for the positive exponents `n` (length `s`).
 *
 * # Safety
 * `sys` must be a live handle, `n` must point to `n_len` values, `out` writable.
 */
enum NcStatus nc_veronese(const struct NcSystem *sys,
                          const uint64_t *n,
                          size_t n_len,
                          struct NcSystem **out);

/**
 * Rees-type system of a single-bimodule system.
 *
 * # Safety
 * `sys` must be a live handle and `out` writable.
 */
enum NcStatus nc_rees(const struct NcSystem *sys, struct NcSystem **out);

/**
 * System on the product scheme.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
enum NcStatus nc_product(const struct NcSystem *x, const struct NcSystem *y, struct NcSystem **out);

/**
 * Quasi-unipotence of the row-major `rho x rho` integer matrix. On success
 * `out` is 1 and `order_out` the least `r` with `(m^r - I)` nilpotent, or
 * `out` is 0 and `order_out` is left untouched.
 *
 * # Safety
 * `rows` must point to `rho * rho` values; `out` must be writable and
 * `order_out` NULL or writable.
 */
enum NcStatus nc_is_quasi_unipotent(const int64_t *rows,
                                    size_t rho,
                                    int32_t *out,
                                    uint64_t *order_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NCAMPLE_H */
