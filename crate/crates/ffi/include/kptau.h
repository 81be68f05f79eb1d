#ifndef KPTAU_H
#define KPTAU_H

/* Generated by cbindgen from the kptau-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes mirroring the CLI exit-code contract.
typedef enum KptauStatus {
  KPTAU_STATUS_OK = 0,
  KPTAU_STATUS_IO_ERROR = 1,
  KPTAU_STATUS_VALIDATION_ERROR = 2,
  KPTAU_STATUS_DIVISOR_POINT = 3,
  KPTAU_STATUS_IDENTITY_FAILURE = 4,
  KPTAU_STATUS_INVALID_ARGUMENT = 5,
} KptauStatus;

// Opaque curve model handle.
typedef struct KptauCurve KptauCurve;

// Opaque period data handle.
typedef struct KptauPeriods KptauPeriods;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread, or NULL.
// The pointer stays valid until the next failing call on the thread.
const char *kptau_last_error(void);

// Frees a string returned by one of the `_json` functions.
//
// # Safety
// `s` must be a pointer previously returned by this library and not yet
// freed.
void kptau_string_free(char *s);

// Parses a curve model from its JSON description.
//
// # Safety
// `json` must be a NUL-terminated UTF-8 string.
struct KptauCurve *kptau_curve_from_json(const char *json);

// Loads a curve model from a JSON file.
//
// # Safety
// `path` must be a NUL-terminated UTF-8 string.
struct KptauCurve *kptau_curve_load(const char *path);

// # Safety
// `curve` must come from a curve constructor and not yet be freed.
void kptau_curve_free(struct KptauCurve *curve);

// Genus of the curve, or -1 on a null handle.
//
// # Safety
// `curve` must be a live handle.
int kptau_curve_genus(const struct KptauCurve *curve);

// Computes period matrices for a hyperelliptic curve with real branch
// points.
//
// # Safety
// `curve` must be a live handle.
struct KptauPeriods *kptau_periods_compute(const struct KptauCurve *curve);

// Loads period data from a JSON file, validating its invariants unless
// `validate` is 0.
//
// # Safety
// `path` must be a NUL-terminated UTF-8 string.
struct KptauPeriods *kptau_periods_load(const char *path, int validate);

// Serialises period data to JSON (free with `kptau_string_free`).
//
// # Safety
// `periods` must be a live handle.
char *kptau_periods_to_json(const struct KptauPeriods *periods);

// # Safety
// `periods` must come from a period constructor and not yet be freed.
void kptau_periods_free(struct KptauPeriods *periods);

// Residual of the generalized Legendre relation; negative on error.
//
// # Safety
// `periods` must be a live handle.
double kptau_periods_legendre_residual(const struct KptauPeriods *periods);

// Zeta and Kleinian wp tensors at `v` as a JSON document (free with
// `kptau_string_free`).  `v` holds `2 g` doubles, re/im interleaved;
// `max_order` is 2..=4.
//
// # Safety
// `periods` must be a live handle and `v` must point to `v_len` doubles.
char *kptau_wp_json(const struct KptauPeriods *periods,
                    const double *v,
                    uintptr_t v_len,
                    int max_order);

// Schur expansion table plus affine window as JSON (free with
// `kptau_string_free`).  `gauge` is 0 for sigma, 1 for theta; `v` holds
// re/im interleaved coordinates.
//
// # Safety
// `curve` and `periods` must be live handles; `v` must point to `v_len`
// doubles.
char *kptau_expand_json(const struct KptauCurve *curve,
                        const struct KptauPeriods *periods,
                        const double *v,
                        uintptr_t v_len,
                        int max_weight,
                        int gauge);

// Runs the identity suites and returns the report list as JSON (free
// with `kptau_string_free`).  `periods` may be NULL, in which case
// genus-2 periods are computed on the fly and the trigonal suite reports
// not-run.  Writes the overall status through `status_out` when
// non-null: `Ok` or `IdentityFailure`.
//
// # Safety
// `curve` must be a live handle; `periods` must be live or NULL;
// `status_out` must be writable or NULL.
char *kptau_verify_json(const struct KptauCurve *curve,
                        const struct KptauPeriods *periods,
                        int samples,
                        double tol,
                        uint64_t seed,
                        enum KptauStatus *status_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KPTAU_H */
