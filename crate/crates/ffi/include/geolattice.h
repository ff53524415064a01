#ifndef GEOLATTICE_H
#define GEOLATTICE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every exported function.
typedef enum GlStatus {
  GL_STATUS_OK = 0,
  GL_STATUS_NULL_POINTER = 1,
  GL_STATUS_INVALID_ARGUMENT = 2,
  GL_STATUS_PARSE_ERROR = 3,
  GL_STATUS_NOT_GEOMETRIC = 4,
  GL_STATUS_TOO_LARGE = 5,
  GL_STATUS_NO_CONVERGENCE = 6,
  GL_STATUS_BUFFER_TOO_SMALL = 7,
  GL_STATUS_INTERNAL = 8,
} GlStatus;

// Opaque lattice handle.
typedef struct GlLattice GlLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Boolean lattice B_n.
//
// # Safety
// `out` must be valid for writes.
enum GlStatus gl_lattice_boolean(uint32_t n, struct GlLattice **out);

// Uniform matroid lattice U(r, m).
//
// # Safety
// `out` must be valid for writes.
enum GlStatus gl_lattice_uniform(uint32_t r, uint32_t m, struct GlLattice **out);

// Subspace lattice of F_q^r (rank r); `q` must be prime.
//
// # Safety
// `out` must be valid for writes.
enum GlStatus gl_lattice_projective(uint32_t r, uint32_t q, struct GlLattice **out);

// Affine flats of F_q^r with an adjoined bottom; `q` must be prime.
//
// # Safety
// `out` must be valid for writes.
enum GlStatus gl_lattice_affine(uint32_t r, uint32_t q, struct GlLattice **out);

// Direct product of two lattices. The factors stay owned by the caller.
//
// # Safety
// `left` and `right` must be live handles or null; `out` must be valid for writes.
enum GlStatus gl_lattice_product(const struct GlLattice *left,
                                 const struct GlLattice *right,
                                 struct GlLattice **out);

// Parses a lattice document (`{"elements": [...], "covers": [...]}`).
// Documents that parse but fail a geometric-lattice check are rejected
// with `GL_STATUS_NOT_GEOMETRIC`.
//
// # Safety
// `json` must be a NUL-terminated string or null; `out` must be valid for writes.
enum GlStatus gl_lattice_from_json(const char *json, struct GlLattice **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `l` must come from a `gl_lattice_*` constructor and not be freed twice.
void gl_lattice_free(struct GlLattice *l);

// Number of elements.
//
// # Safety
// `l` must be a live handle; `out` must be valid for writes.
enum GlStatus gl_lattice_size(const struct GlLattice *l, size_t *out);

// Rank of the top element.
//
// # Safety
// `l` must be a live handle; `out` must be valid for writes.
enum GlStatus gl_lattice_rank(const struct GlLattice *l, uint32_t *out);

// Off-diagonal Jacobi coefficients β_0..β_{r−1} as doubles.
//
// # Safety
// `l` must be a live handle, `len` valid for writes and `beta` valid for
// `capacity` doubles.
enum GlStatus gl_jacobi_beta(const struct GlLattice *l, double *beta, size_t capacity, size_t *len);

// Exact Jacobi data as JSON: layer sizes, cover weights and β² as `"p/q"` strings.
//
// # Safety
// `l` must be a live handle; `out` must be valid for writes. Free the
// result with `gl_string_free`.
enum GlStatus gl_jacobi_json(const struct GlLattice *l, char **out);

// Vacuum spectral measure: nodes ascending, with their weights.
//
// # Safety
// `l` must be a live handle, `len` valid for writes, and `nodes`/`weights`
// each valid for `capacity` doubles.
enum GlStatus gl_spectrum(const struct GlLattice *l,
                          double *nodes,
                          double *weights,
                          size_t capacity,
                          size_t *len);

// Vacuum resolvent G(t) as JSON `{"numerator": [...], "denominator": [...]}`
// with exact coefficients in increasing degree.
//
// # Safety
// `l` must be a live handle; `out` must be valid for writes. Free the
// result with `gl_string_free`.
enum GlStatus gl_resolvent_json(const struct GlLattice *l, char **out);

// Exact vacuum moments m_0..m_{max_k} as a JSON array of `"p/q"` strings.
//
// # Safety
// `l` must be a live handle; `out` must be valid for writes. Free the
// result with `gl_string_free`.
enum GlStatus gl_moments_json(const struct GlLattice *l, size_t max_k, char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void gl_string_free(char *s);

// Static description of a status code.
const char *gl_status_message(enum GlStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEOLATTICE_H */
