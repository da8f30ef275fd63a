#ifndef PATHHODGE_H
#define PATHHODGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum PhStatus {
  PH_STATUS_OK = 0,
  PH_STATUS_NULL_POINTER = 1,
  PH_STATUS_INVALID_ARGUMENT = 2,
  PH_STATUS_PARSE = 3,
  PH_STATUS_NOT_ALLOWED = 4,
  PH_STATUS_NOT_IN_SUBSPACE = 5,
  PH_STATUS_BUFFER_TOO_SMALL = 6,
  PH_STATUS_NON_CONVERGENT = 7,
  PH_STATUS_PANIC = 8,
} PhStatus;

// Opaque digraph handle. Create with [`ph_digraph_new`] or
// [`ph_digraph_parse`], release with [`ph_digraph_free`].
typedef struct PhDigraph PhDigraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null after a success.
// The pointer stays valid until the next call into this library on the
// same thread.
const char *ph_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *ph_version(void);

// Builds a digraph on `n_vertices` vertices from `n_edges` pairs stored
// flat in `edges` (`2 * n_edges` entries, tail then head).
//
// # Safety
// `edges` must point to `2 * n_edges` readable values (it may be null when
// `n_edges` is 0) and `out` must be writable.
enum PhStatus ph_digraph_new(size_t n_vertices,
                             const size_t *edges,
                             size_t n_edges,
                             struct PhDigraph **out);

// Parses the edge-list text format (or its JSON form).
//
// # Safety
// `text` must be a NUL-terminated string and `out` must be writable.
enum PhStatus ph_digraph_parse(const char *text, struct PhDigraph **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `g` must come from this library and must not be used afterwards.
void ph_digraph_free(struct PhDigraph *g);

// # Safety
// `g` must be a live handle or null (which yields 0).
size_t ph_digraph_vertex_count(const struct PhDigraph *g);

// # Safety
// `g` must be a live handle or null (which yields 0).
size_t ph_digraph_edge_count(const struct PhDigraph *g);

// Number of allowed `p`-paths, the length of a `p`-form array.
//
// # Safety
// `g` must be a live handle and `out` writable.
enum PhStatus ph_allowed_count(const struct PhDigraph *g, size_t p, size_t *out);

// Writes the `p + 1` vertices of allowed path `index` into `vertices`.
//
// # Safety
// `g` must be a live handle and `vertices` must hold `p + 1` values.
enum PhStatus ph_allowed_path(const struct PhDigraph *g, size_t p, size_t index, size_t *vertices);

// `dim Ω^p`.
//
// # Safety
// `g` must be a live handle and `out` writable.
enum PhStatus ph_omega_dim(const struct PhDigraph *g, size_t p, size_t *out);

// Dimension of the `p`-th path cohomology.
//
// # Safety
// `g` must be a live handle and `out` writable.
enum PhStatus ph_cohomology_dim(const struct PhDigraph *g, size_t p, size_t *out);

// `p`-th Betti number of the path chain complex.
//
// # Safety
// `g` must be a live handle and `out` writable.
enum PhStatus ph_chain_betti(const struct PhDigraph *g, size_t p, size_t *out);

// Ascending eigenvalues of the Hodge Laplacian on `Ω^p`. `len` receives
// `dim Ω^p`; when `cap` is smaller the call fails with
// `PH_STATUS_BUFFER_TOO_SMALL` and nothing is written.
//
// # Safety
// `g` must be a live handle, `buf` must hold `cap` values, `len` writable.
enum PhStatus ph_laplacian_eigenvalues(const struct PhDigraph *g,
                                       size_t p,
                                       double *buf,
                                       size_t cap,
                                       size_t *len);

// Evolves `u0 ∈ Ω^p` under the heat semigroup for time `t`. Both arrays
// have one entry per allowed `p`-path.
//
// # Safety
// `g` must be a live handle; `u0` and `out` must hold `len` values each.
enum PhStatus ph_heat_apply(const struct PhDigraph *g,
                            size_t p,
                            double t,
                            const double *u0,
                            size_t len,
                            double *out);

// Expectation process `E_steps` of the lazy signed walk on allowed
// `d`-paths, started at `start` (`d + 1` vertices) with orientation
// `sign = ±1`. A negative `laziness` selects the default `M/(M+1) + 0.01`.
// `out` receives one entry per allowed `d`-path.
//
// # Safety
// `g` must be a live handle, `start` must hold `d + 1` values and `out`
// must hold `len` values.
enum PhStatus ph_walk_expectation(const struct PhDigraph *g,
                                  size_t d,
                                  const size_t *start,
                                  int sign,
                                  double laziness,
                                  size_t steps,
                                  double *out,
                                  size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PATHHODGE_H */
