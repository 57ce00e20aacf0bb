#ifndef MPS_H
#define MPS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MpsError {
  MPS_ERROR_OK = 0,
  MPS_ERROR_NULL_POINTER = 1,
  MPS_ERROR_INVALID_ARGUMENT = 2,
  MPS_ERROR_PARSE = 3,
  MPS_ERROR_TOO_LARGE = 4,
  MPS_ERROR_INTERNAL = 5,
} MpsError;

typedef enum MpsFormat {
  MPS_FORMAT_EDGELIST = 0,
  MPS_FORMAT_GML = 1,
  MPS_FORMAT_DIMACS = 2,
} MpsFormat;

typedef enum MpsFormulation {
  MPS_FORMULATION_KURATOWSKI = 0,
  MPS_FORMULATION_FACIAL_WALKS = 1,
  MPS_FORMULATION_SCHNYDER = 2,
  MPS_FORMULATION_LEFT_RIGHT = 3,
} MpsFormulation;

typedef enum MpsSolveStatus {
  MPS_SOLVE_STATUS_OPTIMAL = 0,
  MPS_SOLVE_STATUS_TIME_LIMIT = 1,
  MPS_SOLVE_STATUS_NODE_LIMIT = 2,
  MPS_SOLVE_STATUS_MEMORY_LIMIT = 3,
} MpsSolveStatus;

// A graph under construction; edge ids follow insertion order.
typedef struct MpsGraph MpsGraph;

typedef struct MpsSolution MpsSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The message of the last failed call on this thread, or NULL. The string
// stays valid until the next call into the library on this thread.
const char *mps_last_error_message(void);

// Creates a graph with `n` nodes and no edges.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum MpsError mps_graph_new(uintptr_t n, struct MpsGraph **out);

// Parses a graph from NUL-terminated text.
//
// # Safety
// `text` must be a valid C string and `out` valid for writing a handle.
enum MpsError mps_graph_parse(const char *text, enum MpsFormat format, struct MpsGraph **out);

// Adds the edge `{u, v}` with a positive weight. Its id, the number of
// edges added before it, is written to `out_edge` unless that is NULL.
//
// # Safety
// `g` must be a live graph handle; `out_edge` NULL or valid for writing.
enum MpsError mps_graph_add_edge(struct MpsGraph *g,
                                 uintptr_t u,
                                 uintptr_t v,
                                 int64_t weight,
                                 uintptr_t *out_edge);

// # Safety
// `g` must be NULL or a live graph handle.
uintptr_t mps_graph_num_nodes(const struct MpsGraph *g);

// # Safety
// `g` must be NULL or a live graph handle.
uintptr_t mps_graph_num_edges(const struct MpsGraph *g);

// # Safety
// `g` must be NULL or a handle not yet freed.
void mps_graph_free(struct MpsGraph *g);

// Solves the maximum planar subgraph problem. A `time_limit_s` of zero or
// less means no limit. A time limit still yields a solution, with a
// non-optimal status.
//
// # Safety
// `g` must be a live graph handle and `out` valid for writing a handle.
enum MpsError mps_solve(const struct MpsGraph *g,
                        enum MpsFormulation formulation,
                        double time_limit_s,
                        struct MpsSolution **out);

// # Safety
// `s` must be a live solution handle.
enum MpsSolveStatus mps_solution_status(const struct MpsSolution *s);

// Weight of the kept edges.
//
// # Safety
// `s` must be a live solution handle.
int64_t mps_solution_objective(const struct MpsSolution *s);

// # Safety
// `s` must be a live solution handle.
int64_t mps_solution_dual_bound(const struct MpsSolution *s);

// Weight of the deleted edges.
//
// # Safety
// `s` must be a live solution handle.
int64_t mps_solution_skewness(const struct MpsSolution *s);

// Writes 1 for each kept edge and 0 for each deleted one, by edge id.
// `len` must equal the number of edges of the solved graph.
//
// # Safety
// `s` must be a live solution handle and `out` valid for `len` bytes.
enum MpsError mps_solution_selection(const struct MpsSolution *s, uint8_t *out, uintptr_t len);

// # Safety
// `s` must be NULL or a handle not yet freed.
void mps_solution_free(struct MpsSolution *s);

// Exact maximum planar subgraph weight by exhaustive search, for graphs
// with at most `max_edges` edges.
//
// # Safety
// `g` must be a live graph handle and `out` valid for writing.
enum MpsError mps_oracle_mps_weight(const struct MpsGraph *g, uintptr_t max_edges, int64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MPS_H */
