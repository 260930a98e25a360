#ifndef KFLAT_H
#define KFLAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

// Status codes returned by every fallible call.
enum KflatStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  KFLAT_STATUS_OK = 0,
  KFLAT_STATUS_NULL_POINTER = 1,
  KFLAT_STATUS_DIMENSION = 2,
  KFLAT_STATUS_DOMAIN = 3,
  KFLAT_STATUS_UNSUPPORTED_PROJECTION = 4,
  KFLAT_STATUS_ITERATION_LIMIT = 5,
  KFLAT_STATUS_INDETERMINATE = 6,
  KFLAT_STATUS_INPUT = 7,
  KFLAT_STATUS_INVALID_UTF8 = 8,
  KFLAT_STATUS_PANIC = 9,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum KflatStatus KflatStatus;
#else
typedef int32_t KflatStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// A convex body: ball, segment, V-polytope or half-space.
typedef struct KflatBody KflatBody;

// Result of the projection-reduction solver.
typedef struct KflatCertificate KflatCertificate;

// A finite family of convex bodies.
typedef struct KflatFamily KflatFamily;

// An affine flat `p + span(basis)`.
typedef struct KflatFlat KflatFlat;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next call into the library on the same thread.
const char *kflat_last_error_message(void);

// Releases a string returned by the library.
//
// # Safety
// `s` must come from this library and not be freed twice.
void kflat_string_free(char *s);

// `√((n−r)/(r(n−1)))`.
//
// # Safety
// `result` must be a valid pointer.
KflatStatus kflat_helly_bound(uintptr_t n, uintptr_t r, double *result);

// `1/√r`.
//
// # Safety
// `result` must be a valid pointer.
KflatStatus kflat_colorful_bound(uintptr_t r, double *result);

// `1/√(r−k)`.
//
// # Safety
// `result` must be a valid pointer.
KflatStatus kflat_kflat_bound(uintptr_t r, uintptr_t k, double *result);

// Closed ball of `radius` around `center`.
//
// # Safety
// `center` must point to `dim` doubles and `body` must be a valid pointer.
KflatStatus kflat_body_ball(uintptr_t dim,
                            const double *center,
                            double radius,
                            struct KflatBody **body);

// Segment `[a, b]`.
//
// # Safety
// `a` and `b` must point to `dim` doubles and `body` must be a valid pointer.
KflatStatus kflat_body_segment(uintptr_t dim,
                               const double *a,
                               const double *b,
                               struct KflatBody **body);

// Convex hull of `count` points stored row-major in `vertices`.
//
// # Safety
// `vertices` must point to `count * dim` doubles and `body` must be a valid pointer.
KflatStatus kflat_body_polytope(uintptr_t dim,
                                uintptr_t count,
                                const double *vertices,
                                struct KflatBody **body);

// Half-space `{x : ⟨n, x⟩ ≥ offset}` with `n` the normalized `normal`.
//
// # Safety
// `normal` must point to `dim` doubles and `body` must be a valid pointer.
KflatStatus kflat_body_halfspace(uintptr_t dim,
                                 const double *normal,
                                 double offset,
                                 struct KflatBody **body);

// Ambient dimension of a body, 0 for null.
//
// # Safety
// `body` must be null or a live handle.
uintptr_t kflat_body_dim(const struct KflatBody *body);

// Distance from the point `q` to the body.
//
// # Safety
// `q` must point to the body's dimension of doubles and `result` must be valid.
KflatStatus kflat_body_distance_to_point(const struct KflatBody *body,
                                         const double *q,
                                         double *result);

// # Safety
// `body` must be null or a handle not yet freed.
void kflat_body_free(struct KflatBody *body);

// Flat through `point` spanned by `k` row-major vectors in `basis`
// (orthonormalized internally; `k = 0` gives a point).
//
// # Safety
// `point` must hold `dim` doubles, `basis` `k * dim` doubles, and `flat` must be valid.
KflatStatus kflat_flat_new(uintptr_t dim,
                           const double *point,
                           uintptr_t k,
                           const double *basis,
                           struct KflatFlat **flat);

// Ambient dimension of a flat, 0 for null.
//
// # Safety
// `flat` must be null or a live handle.
uintptr_t kflat_flat_ambient_dim(const struct KflatFlat *flat);

// Dimension `k` of a flat, 0 for null.
//
// # Safety
// `flat` must be null or a live handle.
uintptr_t kflat_flat_k(const struct KflatFlat *flat);

// Copies the base point (the point of the flat closest to the origin) into
// `buffer`, which must hold the ambient dimension of doubles.
//
// # Safety
// `buffer` must hold `len` doubles.
KflatStatus kflat_flat_base(const struct KflatFlat *flat, double *buffer, uintptr_t len);

// Copies the orthonormal basis, row-major, into `buffer` of `len ≥ k * dim` doubles.
//
// # Safety
// `buffer` must hold `len` doubles.
KflatStatus kflat_flat_basis(const struct KflatFlat *flat, double *buffer, uintptr_t len);

// # Safety
// `flat` must be null or a handle not yet freed.
void kflat_flat_free(struct KflatFlat *flat);

// Empty family named `name` (may be null).
//
// # Safety
// `name` must be null or a NUL-terminated string, and `family` must be valid.
KflatStatus kflat_family_new(const char *name, struct KflatFamily **family);

// Appends a copy of `body`.
//
// # Safety
// Both handles must be live.
KflatStatus kflat_family_push(struct KflatFamily *family, const struct KflatBody *body);

// Number of bodies, 0 for null.
//
// # Safety
// `family` must be null or a live handle.
uintptr_t kflat_family_len(const struct KflatFamily *family);

// # Safety
// `family` must be null or a handle not yet freed.
void kflat_family_free(struct KflatFamily *family);

// Distance between a body and a flat.
//
// # Safety
// Handles must be live and `result` valid.
KflatStatus kflat_dist_body_flat(const struct KflatBody *body,
                                 const struct KflatFlat *flat,
                                 double *result);

// Distance between two bodies.
//
// # Safety
// Handles must be live and `result` valid.
KflatStatus kflat_dist_body_body(const struct KflatBody *a,
                                 const struct KflatBody *b,
                                 double tol,
                                 double *result);

// Projects families `k..r` orthogonally to the `k` row-major `directions`,
// solves the colorful point problem there and lifts the answer to a k-flat.
//
// # Safety
// `families` must hold `r` live handles, `directions` `k * dim` doubles, and
// `certificate` must be valid.
KflatStatus kflat_reduce_and_lift(const struct KflatFamily *const *families,
                                  uintptr_t r,
                                  const double *directions,
                                  uintptr_t k,
                                  double tol,
                                  uint64_t seed,
                                  struct KflatCertificate **certificate);

// Largest distance from the certified flat to a body of the winning family.
//
// # Safety
// `certificate` must be null or a live handle.
double kflat_certificate_max_distance(const struct KflatCertificate *certificate);

// The bound `1/√(r−k)` the certificate is measured against.
//
// # Safety
// `certificate` must be null or a live handle.
double kflat_certificate_bound(const struct KflatCertificate *certificate);

// 0-based index of the winning family, `SIZE_MAX` for null.
//
// # Safety
// `certificate` must be null or a live handle.
uintptr_t kflat_certificate_family(const struct KflatCertificate *certificate);

// New flat handle holding a copy of the certified flat.
//
// # Safety
// `certificate` must be live and `flat` valid.
KflatStatus kflat_certificate_flat(const struct KflatCertificate *certificate,
                                   struct KflatFlat **flat);

// # Safety
// `certificate` must be null or a handle not yet freed.
void kflat_certificate_free(struct KflatCertificate *certificate);

// Runs the full `solve` pipeline on an instance file given as JSON text and
// returns the JSON report in `report` (free with [`kflat_string_free`]).
// `truncation = 0` keeps the per-family truncations; `passed` receives 1 when
// every claim holds.
//
// # Safety
// `instance_json` must be NUL-terminated; `report` and `passed` must be valid.
KflatStatus kflat_solve_json(const char *instance_json,
                             uintptr_t truncation,
                             double tol,
                             uint64_t seed,
                             char **report,
                             int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KFLAT_H */
