#ifndef MODORB_H
#define MODORB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ModorbStatus {
  MODORB_STATUS_OK = 0,
  MODORB_STATUS_NULL_POINTER = -1,
  MODORB_STATUS_INVALID_UTF8 = -2,
  MODORB_STATUS_PARSE = -3,
  MODORB_STATUS_INVALID_DATUM = -4,
  MODORB_STATUS_NOT_PRIME = -5,
  MODORB_STATUS_OUT_OF_RANGE = -6,
  MODORB_STATUS_NOT_UNIMODULAR = -7,
  MODORB_STATUS_NUMERICAL = -8,
  MODORB_STATUS_PANIC = -99,
} ModorbStatus;

typedef enum ModorbConvention {
  MODORB_CONVENTION_MINUS = 0,
  MODORB_CONVENTION_PLUS = 1,
} ModorbConvention;

/**
 * Opaque modular datum.
 */
typedef struct ModorbDatum ModorbDatum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the next call.
 */
const char *modorb_last_error_message(void);

/**
 * Parses a datum document (`central_charge`, `modules`, `S`).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out_datum` must be writable.
 */
enum ModorbStatus modorb_datum_from_json(const char *json, struct ModorbDatum **out_datum);

/**
 * Loads a shipped fixture: `ising`, `fibonacci` or `e8`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out_datum` must be writable.
 */
enum ModorbStatus modorb_datum_fixture(const char *name, struct ModorbDatum **out_datum);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `d` must come from this library and not be freed twice.
 */
void modorb_datum_free(struct ModorbDatum *d);

/**
 * # Safety
 * `d` must be a live handle; `rank` must be writable.
 */
enum ModorbStatus modorb_datum_rank(const struct ModorbDatum *d, size_t *rank);

/**
 * # Safety
 * `d` must be a live handle; `re` and `im` must be writable.
 */
enum ModorbStatus modorb_datum_s_entry(const struct ModorbDatum *d,
                                       size_t i,
                                       size_t j,
                                       double *re,
                                       double *im);

/**
 * `T_ii = e^{2πi·num/den}` with `0 <= num/den < 1` in lowest terms.
 *
 * # Safety
 * `d` must be a live handle; `num` and `den` must be writable.
 */
enum ModorbStatus modorb_datum_t_angle(const struct ModorbDatum *d,
                                       size_t i,
                                       int64_t *num,
                                       int64_t *den);

/**
 * Runs the full validation suite. Non-positive tolerances select the defaults.
 * `passed` is 1 if every check passes, else 0. See [`modorb_datum_validation_report`]
 * for the individual checks.
 *
 * # Safety
 * `d` must be a live handle; `passed` must be writable.
 */
enum ModorbStatus modorb_datum_validate(const struct ModorbDatum *d,
                                        double eps,
                                        double eps_int,
                                        int32_t *passed);

/**
 * Validation report as text, one line per check.
 *
 * # Safety
 * `d` must be a live handle; `report` must be writable. Free the string with
 * [`modorb_string_free`].
 */
enum ModorbStatus modorb_datum_validation_report(const struct ModorbDatum *d,
                                                 double eps,
                                                 double eps_int,
                                                 char **report);

/**
 * Verlinde fusion coefficient `N_{ij}^m`.
 *
 * # Safety
 * `d` must be a live handle; `n` must be writable.
 */
enum ModorbStatus modorb_datum_fusion(const struct ModorbDatum *d,
                                      size_t i,
                                      size_t j,
                                      size_t m,
                                      uint32_t *n);

/**
 * Modular datum of the cyclic permutation orbifold `(V^{⊗k})^{Z_k}`, `k` prime.
 *
 * # Safety
 * `d` must be a live handle; `out_datum` must be writable.
 */
enum ModorbStatus modorb_perm_orbifold(const struct ModorbDatum *d,
                                       size_t k,
                                       enum ModorbConvention convention,
                                       struct ModorbDatum **out_datum);

/**
 * Serializes a datum to its JSON document.
 *
 * # Safety
 * `d` must be a live handle; `json` must be writable. Free the string with
 * [`modorb_string_free`].
 */
enum ModorbStatus modorb_datum_to_json(const struct ModorbDatum *d, char **json);

/**
 * Writes the S/T word for `(a, b; c, d)`, e.g. `"S T^-1 S"`.
 *
 * # Safety
 * `word` must be writable. Free the string with [`modorb_string_free`].
 */
enum ModorbStatus modorb_sl2z_decompose(int64_t a, int64_t b, int64_t c, int64_t d, char **word);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void modorb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MODORB_H */
