#ifndef AFFINE_FRACTALS_H
#define AFFINE_FRACTALS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define AF_FAMILY_SPONGE 0

#define AF_FAMILY_SIMPLEX 1

#define AF_FORMAT_SVG 0

#define AF_FORMAT_OBJ 1

#define AF_FORMAT_JSON 2

/**
 * Largest point box or cell count a single call will build.
 */
#define AF_MAX_ELEMENTS 10000000

typedef enum AfStatus {
  AF_STATUS_OK = 0,
  AF_STATUS_INVALID_ARGUMENT = 2,
  AF_STATUS_VALIDATION = 3,
  AF_STATUS_IO = 4,
  AF_STATUS_NULL_POINTER = 5,
  AF_STATUS_PANIC = 6,
} AfStatus;

/**
 * Opaque mesh handle.
 */
typedef struct AfMesh AfMesh;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a mesh from the default frame of `family` in dimension `n`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum AfStatus af_mesh_generate(uint32_t family, size_t n, size_t m, struct AfMesh **out);

/**
 * Builds a mesh from a frame given as a JSON document; `n` is taken from
 * the frame.
 *
 * # Safety
 * `frame_json` must be a NUL-terminated string; `out` as in
 * `af_mesh_generate`.
 */
enum AfStatus af_mesh_generate_with_frame_json(uint32_t family,
                                               size_t m,
                                               const char *frame_json,
                                               struct AfMesh **out);

/**
 * Releases a mesh. Null is ignored.
 *
 * # Safety
 * `mesh` must come from this library and not be used afterwards.
 */
void af_mesh_free(struct AfMesh *mesh);

/**
 * # Safety
 * `mesh` must be a live handle and `out` writable.
 */
enum AfStatus af_mesh_cell_count(const struct AfMesh *mesh, size_t *out);

/**
 * Number of coordinates per vertex.
 *
 * # Safety
 * `mesh` must be a live handle and `out` writable.
 */
enum AfStatus af_mesh_ambient_dim(const struct AfMesh *mesh, size_t *out);

/**
 * Vertices per cell: `2^n` for sponges, `n + 1` for simplices.
 *
 * # Safety
 * `mesh` must be a live handle and `out` writable.
 */
enum AfStatus af_mesh_cell_vertex_count(const struct AfMesh *mesh, size_t *out);

/**
 * Copies the vertices of cell `cell` (0-based) into `buffer`, row by row.
 * `len` must be at least vertex count times ambient dimension.
 *
 * # Safety
 * `buffer` must point to `len` writable doubles.
 */
enum AfStatus af_mesh_cell_vertices(const struct AfMesh *mesh,
                                    size_t cell,
                                    double *buffer,
                                    size_t len);

/**
 * Writes the mesh to `path` as SVG (n = 2), OBJ (n = 3) or JSON.
 *
 * # Safety
 * `path` must be a NUL-terminated string.
 */
enum AfStatus af_mesh_export(const struct AfMesh *mesh, uint32_t format, const char *path);

/**
 * Serializes the mesh as a JSON document. Release with `af_string_free`.
 *
 * # Safety
 * `out` must be writable.
 */
enum AfStatus af_mesh_to_json(const struct AfMesh *mesh, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void af_string_free(char *s);

/**
 * Closed-form cell count. Fails with `InvalidArgument` if it overflows
 * 64 bits.
 *
 * # Safety
 * `out` must be writable.
 */
enum AfStatus af_count_closed_form(uint32_t family, size_t n, size_t m, uint64_t *out);

/**
 * Membership of the cell index `coords[0..n]` (1-based) at level `m`.
 *
 * # Safety
 * `coords` must point to `n` readable values and `out` be writable.
 */
enum AfStatus af_is_member(uint32_t family, const size_t *coords, size_t n, size_t m, bool *out);

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *af_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AFFINE_FRACTALS_H */
