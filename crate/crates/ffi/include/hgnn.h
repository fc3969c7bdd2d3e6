#ifndef HGNN_H
#define HGNN_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum HgnnStatus {
  HGNN_STATUS_OK = 0,
  HGNN_STATUS_NULL_POINTER = 1,
  HGNN_STATUS_INVALID_ARGUMENT = 2,
  HGNN_STATUS_INVALID_HYPERGRAPH = 3,
  HGNN_STATUS_DIMENSION_MISMATCH = 4,
  HGNN_STATUS_IO_ERROR = 5,
  HGNN_STATUS_PARSE_ERROR = 6,
  HGNN_STATUS_TOO_LARGE = 7,
  HGNN_STATUS_BUFFER_TOO_SMALL = 8,
  HGNN_STATUS_PANIC = 9,
} HgnnStatus;

/**
 * Opaque hypergraph handle.
 */
typedef struct HgnnHypergraph HgnnHypergraph;

/**
 * Opaque model handle.
 */
typedef struct HgnnModel HgnnModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *hgnn_version(void);

/**
 * Message of the last failed call on this thread, empty after a success.
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *hgnn_last_error_message(void);

/**
 * Build a hypergraph from compressed edge lists: edge `e` holds
 * `vertices[offsets[e] .. offsets[e + 1]]`. `offsets` has `n_edges + 1`
 * entries. `weights` may be null for unit weights.
 *
 * # Safety
 * Pointers must be valid for the stated lengths.
 */
enum HgnnStatus hgnn_hypergraph_new(size_t n_vertices,
                                    size_t n_edges,
                                    const size_t *offsets,
                                    const size_t *vertices,
                                    const double *weights,
                                    struct HgnnHypergraph **out);

/**
 * Read a hyperedge file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum HgnnStatus hgnn_hypergraph_load(const char *path, struct HgnnHypergraph **out);

/**
 * Write a hyperedge file.
 *
 * # Safety
 * `graph` must be a live handle and `path` a NUL-terminated string.
 */
enum HgnnStatus hgnn_hypergraph_save(const struct HgnnHypergraph *graph, const char *path);

/**
 * One hyperedge per vertex: the vertex and its `k` nearest neighbours.
 *
 * # Safety
 * `features` must hold `n_vertices * dim` values.
 */
enum HgnnStatus hgnn_hypergraph_knn(const double *features_ptr,
                                    size_t n_vertices,
                                    size_t dim,
                                    size_t k,
                                    struct HgnnHypergraph **out);

/**
 * Concatenate the hyperedges of `count` hypergraphs on the same vertex set.
 *
 * # Safety
 * `graphs` must point to `count` live handles.
 */
enum HgnnStatus hgnn_hypergraph_concat(const struct HgnnHypergraph *const *graphs,
                                       size_t count,
                                       struct HgnnHypergraph **out);

/**
 * # Safety
 * `graph` must be a live handle and `out` writable.
 */
enum HgnnStatus hgnn_hypergraph_n_vertices(const struct HgnnHypergraph *graph, size_t *out);

/**
 * # Safety
 * `graph` must be a live handle and `out` writable.
 */
enum HgnnStatus hgnn_hypergraph_n_edges(const struct HgnnHypergraph *graph, size_t *out);

/**
 * Weighted vertex degrees into `out[0 .. n_vertices]`.
 *
 * # Safety
 * `out` must be writable for `len` values.
 */
enum HgnnStatus hgnn_hypergraph_vertex_degrees(const struct HgnnHypergraph *graph,
                                               double *out,
                                               size_t len);

/**
 * Hyperedge sizes into `out[0 .. n_edges]`.
 *
 * # Safety
 * `out` must be writable for `len` values.
 */
enum HgnnStatus hgnn_hypergraph_edge_degrees(const struct HgnnHypergraph *graph,
                                             size_t *out,
                                             size_t len);

/**
 * Dense normalized propagation operator, `n_vertices²` values row-major.
 *
 * # Safety
 * `out` must be writable for `len` values.
 */
enum HgnnStatus hgnn_hypergraph_theta_dense(const struct HgnnHypergraph *graph,
                                            double *out,
                                            size_t len);

/**
 * `out = Θ x` for an `n_vertices × cols` matrix `x`.
 *
 * # Safety
 * `x` and `out` must each hold `n_vertices * cols` values.
 */
enum HgnnStatus hgnn_hypergraph_propagate(const struct HgnnHypergraph *graph,
                                          const double *x,
                                          size_t cols,
                                          double *out);

/**
 * Hypergraph smoothness regularizer of a signal with one value per vertex.
 *
 * # Safety
 * `signal` must hold `len` values and `out` be writable.
 */
enum HgnnStatus hgnn_hypergraph_regularizer(const struct HgnnHypergraph *graph,
                                            const double *signal,
                                            size_t len,
                                            double *out);

/**
 * Release a hypergraph handle. Null is ignored.
 *
 * # Safety
 * `graph` must come from this library and not be used afterwards.
 */
void hgnn_hypergraph_free(struct HgnnHypergraph *graph);

/**
 * Load a trained model from a checkpoint file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum HgnnStatus hgnn_model_load(const char *path, struct HgnnModel **out);

/**
 * Input feature width and number of classes.
 *
 * # Safety
 * `model` must be a live handle; output pointers must be writable.
 */
enum HgnnStatus hgnn_model_dims(const struct HgnnModel *model,
                                size_t *input_dim,
                                size_t *n_classes);

/**
 * Eval-mode logits, `n_vertices × n_classes` row-major.
 *
 * # Safety
 * `features` must hold `n_vertices * input_dim` values and `out` be
 * writable for `len` values.
 */
enum HgnnStatus hgnn_model_predict(const struct HgnnModel *model,
                                   const struct HgnnHypergraph *graph,
                                   const double *features_ptr,
                                   size_t dim,
                                   double *out,
                                   size_t len);

/**
 * Release a model handle. Null is ignored.
 *
 * # Safety
 * `model` must come from this library and not be used afterwards.
 */
void hgnn_model_free(struct HgnnModel *model);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HGNN_H */
