#ifndef LINKPACK_H
#define LINKPACK_H

/* Generated by cbindgen from linkpack-ffi; edit src/lib.rs instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call. Anything other than `Ok` leaves a
// description in [`lp_last_error_message`].
typedef enum LpStatus {
  // The call succeeded.
  LP_STATUS_OK = 0,
  // A required pointer argument was null.
  LP_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  LP_STATUS_INVALID_STRING = 2,
  // Arguments were structurally valid but rejected.
  LP_STATUS_BAD_INPUT = 3,
  // A declared separation constraint is violated.
  LP_STATUS_CONSTRAINT_VIOLATION = 4,
  // The request exceeds a size cap.
  LP_STATUS_TOO_LARGE = 5,
  // An unexpected internal failure; file a bug.
  LP_STATUS_INTERNAL = 6,
} LpStatus;

// A separation certificate for a two-component link.
typedef struct LpCertificate LpCertificate;

// A piecewise-linear link in the unit cube.
typedef struct LpLink LpLink;

// A multi-generation packing of separated pairs.
typedef struct LpPacking LpPacking;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Returns a copy of the message left by the most recent failing call on
// this thread, or an empty string. Free it with [`lp_string_free`].
char *lp_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
//
// `text` must be a pointer previously returned by a linkpack function
// and not freed since.
void lp_string_free(char *text);

// Parses a link from its JSON form.
//
// # Safety
//
// `text` must be a valid NUL-terminated string and `out` a valid
// pointer; on success `*out` owns the link until [`lp_link_free`].
enum LpStatus lp_link_from_json(const char *text, struct LpLink **out);

// Builds the standard separated Hopf pair for a separation bound.
//
// # Safety
//
// `out` must be a valid pointer; on success `*out` owns the link until
// [`lp_link_free`].
enum LpStatus lp_link_canonical_hopf(double epsilon, struct LpLink **out);

// Builds the split pair: two far-apart circles with the same labels.
//
// # Safety
//
// `out` must be a valid pointer; on success `*out` owns the link until
// [`lp_link_free`].
enum LpStatus lp_link_split_pair(double epsilon, struct LpLink **out);

// Serializes a link to JSON.
//
// # Safety
//
// `link` must be a live handle and `out` a valid pointer; on success
// `*out` owns the string until [`lp_string_free`].
enum LpStatus lp_link_to_json(const struct LpLink *link, char **out);

// Signed linking number of two labeled components of a link.
//
// # Safety
//
// `link` must be a live handle, the labels valid NUL-terminated
// strings, and `out` a valid pointer.
enum LpStatus lp_linking_number(const struct LpLink *link,
                                const char *label_a,
                                const char *label_b,
                                int64_t *out);

// Releases a link handle. Null is ignored.
//
// # Safety
//
// `link` must be a handle from this library, not freed since.
void lp_link_free(struct LpLink *link);

// Builds the separation certificate for two labeled components.
//
// # Safety
//
// `link` must be a live handle, the labels valid NUL-terminated
// strings, and `out` a valid pointer; on success `*out` owns the
// certificate until [`lp_certificate_free`].
enum LpStatus lp_certify(const struct LpLink *link,
                         const char *red,
                         const char *blue,
                         double epsilon,
                         struct LpCertificate **out);

// Reads the headline bit of a certificate: true exactly when the pair
// is certified inseparable.
//
// # Safety
//
// `cert` must be a live handle and `out` a valid pointer.
enum LpStatus lp_certificate_eq1(const struct LpCertificate *cert, bool *out);

// Copies the coloring fingerprint of a certificate.
//
// # Safety
//
// `cert` must be a live handle and `out` a valid pointer; on success
// `*out` owns the string until [`lp_string_free`].
enum LpStatus lp_certificate_fingerprint(const struct LpCertificate *cert, char **out);

// Serializes a certificate to JSON.
//
// # Safety
//
// `cert` must be a live handle and `out` a valid pointer; on success
// `*out` owns the string until [`lp_string_free`].
enum LpStatus lp_certificate_to_json(const struct LpCertificate *cert, char **out);

// Releases a certificate handle. Null is ignored.
//
// # Safety
//
// `cert` must be a handle from this library, not freed since.
void lp_certificate_free(struct LpCertificate *cert);

// Builds a packing of separated pairs, up to a generation limit.
//
// # Safety
//
// `out` must be a valid pointer; on success `*out` owns the packing
// until [`lp_packing_free`].
enum LpStatus lp_pack(double epsilon, uint32_t generations, struct LpPacking **out);

// Parses a packing from its JSON form.
//
// # Safety
//
// `text` must be a valid NUL-terminated string and `out` a valid
// pointer; on success `*out` owns the packing until
// [`lp_packing_free`].
enum LpStatus lp_packing_from_json(const char *text, struct LpPacking **out);

// Serializes a packing to JSON.
//
// # Safety
//
// `packing` must be a live handle and `out` a valid pointer; on
// success `*out` owns the string until [`lp_string_free`].
enum LpStatus lp_packing_to_json(const struct LpPacking *packing, char **out);

// Total number of pairs across all generations of a packing.
//
// # Safety
//
// `packing` must be a live handle and `out` a valid pointer.
enum LpStatus lp_packing_pair_count(const struct LpPacking *packing, uint64_t *out);

// Re-checks every pair of a packing against a separation bound.
// `*out_pass` reports the verdict; the call itself only fails on bad
// arguments.
//
// # Safety
//
// `packing` must be a live handle and `out_pass` a valid pointer.
enum LpStatus lp_packing_verify(const struct LpPacking *packing, double epsilon, bool *out_pass);

// Releases a packing handle. Null is ignored.
//
// # Safety
//
// `packing` must be a handle from this library, not freed since.
void lp_packing_free(struct LpPacking *packing);

// Computes a Milnor invariant from planar-diagram text. `indices`
// names the component sequence; `modulus` of 0 keeps the exact
// integer, a positive prime also reduces it. The coefficient is
// written as a decimal string, the residue only when a modulus was
// given, and `out_indeterminate` flags a value that is only defined
// modulo shorter invariants.
//
// # Safety
//
// `pd_text` must be a valid NUL-terminated string, `indices` must
// point to `indices_len` readable entries, and the three output
// pointers must be valid; on success `*out_coefficient` owns the
// string until [`lp_string_free`].
enum LpStatus lp_mu_bar(const char *pd_text,
                        const uint32_t *indices,
                        size_t indices_len,
                        uint64_t modulus,
                        char **out_coefficient,
                        uint64_t *out_residue,
                        bool *out_indeterminate);

// Order of the rank-m free exponent-3 group, as a decimal string.
//
// # Safety
//
// `out` must be a valid pointer; on success `*out` owns the string
// until [`lp_string_free`].
enum LpStatus lp_burnside_order(uint64_t m, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINKPACK_H */
