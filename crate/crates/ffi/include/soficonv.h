#ifndef SOFICONV_H
#define SOFICONV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum SoficonvStatus {
  SOFICONV_STATUS_OK = 0,
  SOFICONV_STATUS_NULL_POINTER = 1,
  SOFICONV_STATUS_INVALID_UTF8 = 2,
  // Malformed input: unparsable numbers, JSON or words.
  SOFICONV_STATUS_INVALID_INPUT = 3,
  // Well-formed input outside the domain of the operation.
  SOFICONV_STATUS_DOMAIN_ERROR = 4,
  // A resource cap such as the carry-state cap was exceeded.
  SOFICONV_STATUS_CAP_EXCEEDED = 5,
  SOFICONV_STATUS_PANIC = 6,
} SoficonvStatus;

// Validated linear representation; created by [`soficonv_linrep_from_json`].
typedef struct SoficonvLinearRepresentation SoficonvLinearRepresentation;

// Base `β` with its digit count; created by [`soficonv_pisot_base_new`].
typedef struct SoficonvPisotBase SoficonvPisotBase;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *soficonv_version(void);

// Code of the last error on this thread (e.g. `"NOT_FINITE_RENYI"`), or null.
// Valid until the next soficonv call on the same thread.
const char *soficonv_last_error_code(void);

// Message of the last error on this thread, or null.
const char *soficonv_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from a soficonv function and not have been freed.
void soficonv_string_free(char *s);

// Number of base-2 representations of `n` with digits `{0, 1, 2}`.
uint64_t soficonv_stern(uint64_t n);

// Number of base-`b` representations of `n` with digits `{0..d−1}`, as a decimal string.
//
// # Safety
// `out` must be a valid pointer to a `char *`.
enum SoficonvStatus soficonv_bernoulli_count(size_t b, size_t d, uint64_t n, char **out);

// Mean of `log f(n) / log 2^{K−1}` over `[2^{K−1}, 2^K)`.
//
// # Safety
// `out` must be a valid pointer to a `double`.
enum SoficonvStatus soficonv_alpha0(uint32_t k, double *out);

// Creates a base from the minimal polynomial (`len` integer coefficients,
// constant term first), an isolating interval given as decimal or `p/q`
// strings, and the digit count `d`.
//
// # Safety
// `minpoly` must point to `len` integers; `lo` and `hi` must be
// NUL-terminated strings; `out` must be a valid pointer.
enum SoficonvStatus soficonv_pisot_base_new(const int64_t *minpoly,
                                            size_t len,
                                            const char *lo,
                                            const char *hi,
                                            size_t d,
                                            size_t state_cap,
                                            struct SoficonvPisotBase **out);

// # Safety
// `base` must come from [`soficonv_pisot_base_new`] and not have been freed.
void soficonv_pisot_base_free(struct SoficonvPisotBase *base);

// Quasi-expansion of 1 as JSON `{"digits":"10","T":2}`.
//
// # Safety
// `base` must be a live handle and `out` a valid pointer.
enum SoficonvStatus soficonv_pisot_quasi_expansion(const struct SoficonvPisotBase *base,
                                                   char **out);

// Carry states of `window` (`"open"`, `"half-open"` or `"symmetric"`) as a
// JSON array of coordinate vectors in the power basis.
//
// # Safety
// `base` must be a live handle, `window` a NUL-terminated string and `out` a valid pointer.
enum SoficonvStatus soficonv_pisot_carry_states(const struct SoficonvPisotBase *base,
                                                const char *window,
                                                char **out);

// Number of digit words of length `len` over `{0..d−1}` with the same value
// as `word`, as a decimal string.
//
// # Safety
// `base` must be a live handle, `word` must point to `len` letters and `out` must be valid.
enum SoficonvStatus soficonv_pisot_count_redundant(const struct SoficonvPisotBase *base,
                                                   const size_t *word,
                                                   size_t len,
                                                   char **out);

// Parses `{"R":…,"M":…,"C":…}` with rational entries as strings.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum SoficonvStatus soficonv_linrep_from_json(const char *json,
                                              struct SoficonvLinearRepresentation **out);

// # Safety
// `rep` must come from [`soficonv_linrep_from_json`] and not have been freed.
void soficonv_linrep_free(struct SoficonvLinearRepresentation *rep);

// Cylinder value `R_{w₁} M_{w₂} … M_{w_n} C` as an exact `"p/q"` string.
//
// # Safety
// `rep` must be a live handle, `word` must point to `len` letters and `out` must be valid.
enum SoficonvStatus soficonv_linrep_cylinder(const struct SoficonvLinearRepresentation *rep,
                                             const size_t *word,
                                             size_t len,
                                             char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOFICONV_H */
