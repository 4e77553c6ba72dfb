#ifndef SIGNCLUST_H
#define SIGNCLUST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum ScStatus {
  SC_STATUS_OK = 0,
  SC_STATUS_NULL_POINTER = 1,
  SC_STATUS_INVALID_ARGUMENT = 2,
  SC_STATUS_INDEX_OUT_OF_RANGE = 3,
  SC_STATUS_BAD_EDGE = 4,
  SC_STATUS_ISOLATED_NODE = 5,
  SC_STATUS_INDEFINITE_PENCIL = 6,
  SC_STATUS_TOO_LARGE = 7,
  SC_STATUS_PARSE = 8,
  SC_STATUS_IO = 9,
  SC_STATUS_INTERNAL = 10,
  SC_STATUS_PANIC = 11,
} ScStatus;

// Opaque signed graph.
typedef struct ScGraph ScGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Build a graph on `n` nodes from `m` undirected edges `(src[e], dst[e], weight[e])`.
//
// # Safety
// `src`, `dst` and `weight` must each point to `m` readable values (they
// may be null when `m == 0`). `out` must be a valid pointer; on success it
// receives a handle to free with [`sc_graph_free`].
enum ScStatus sc_graph_from_edges(size_t n,
                                  const size_t *src,
                                  const size_t *dst,
                                  const double *weight,
                                  size_t m,
                                  struct ScGraph **out);

// Read a graph from an edge-list file (`j j' w` per line, `#` comments).
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum ScStatus sc_graph_read_edge_list(const char *path, struct ScGraph **out);

// Release a graph. Null is ignored.
//
// # Safety
// `g` must be null or a handle from this library not already freed.
void sc_graph_free(struct ScGraph *g);

// Node count, 0 for a null handle.
//
// # Safety
// `g` must be null or a live handle.
size_t sc_graph_node_count(const struct ScGraph *g);

// Undirected edge count, 0 for a null handle.
//
// # Safety
// `g` must be null or a live handle.
size_t sc_graph_edge_count(const struct ScGraph *g);

// Sample from the signed stochastic block model with `k` equal-sized
// clusters. When `labels` is non-null it receives the `n` true labels.
//
// # Safety
// `out` must be valid; `labels` must be null or point to `n` writable values.
enum ScStatus sc_ssbm_sample(size_t n,
                             size_t k,
                             double p,
                             double eta,
                             uint64_t seed,
                             struct ScGraph **out,
                             size_t *labels);

// Cluster `g` into `k` groups with the named method (`"SPONGE_sym"`,
// `"Lbar_sym_reg"`, ...). `labels` receives one label per node, -1 for
// nodes outside the largest connected component.
//
// # Safety
// `g` must be a live handle, `method` a NUL-terminated string, and
// `labels` must point to `sc_graph_node_count(g)` writable values.
enum ScStatus sc_cluster(const struct ScGraph *g,
                         const char *method,
                         size_t k,
                         double tau_plus,
                         double tau_minus,
                         uint64_t seed,
                         int64_t *labels);

// Adjusted Rand index between two labelings of `n` nodes.
//
// # Safety
// `a` and `b` must point to `n` values; `out` must be valid.
enum ScStatus sc_ari(const size_t *a, const size_t *b, size_t n, double *out);

// Fraction of misassigned nodes under the best matching of `k` labels.
//
// # Safety
// `pred` and `truth` must point to `n` values below `k`; `out` must be valid.
enum ScStatus sc_misclustering_rate(const size_t *pred,
                                    const size_t *truth,
                                    size_t n,
                                    size_t k,
                                    double *out);

// Message for the last failed call on this thread, or null. Valid until
// the next call into the library from the same thread.
const char *sc_last_error_message(void);

// Static description of a status code.
const char *sc_status_string(enum ScStatus status);

// Library version as a static string.
const char *sc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIGNCLUST_H */
