//! C interface to the solver.
//!
//! Graphs and solutions are opaque handles owned by the caller and released
//! with their `_free` function. Every fallible call returns an `MpsError`;
//! on failure `mps_last_error_message` describes the error until the next
//! call on the same thread.

use std::cell::RefCell;
use std::collections::HashSet;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use mps_core::bench::{parse_graph, GraphFormat};
use mps_core::formulations::Formulation;
use mps_core::graph::WeightedGraph;
use mps_core::oracle::oracle_skewness_with_limit;
use mps_core::pbsolver::SolveStatus;
use mps_core::pipeline::{solve_mps, MpsSolution as CoreSolution, SolveConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpsError {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    TooLarge = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpsFormulation {
    Kuratowski = 0,
    FacialWalks = 1,
    Schnyder = 2,
    LeftRight = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpsFormat {
    Edgelist = 0,
    Gml = 1,
    Dimacs = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpsSolveStatus {
    Optimal = 0,
    TimeLimit = 1,
    NodeLimit = 2,
    MemoryLimit = 3,
}

/// A graph under construction; edge ids follow insertion order.
pub struct MpsGraph {
    n: usize,
    edges: Vec<(usize, usize, i64)>,
    pairs: HashSet<(usize, usize)>,
}

impl MpsGraph {
    fn from_graph(g: &WeightedGraph) -> Self {
        let edges: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, e.weight)).collect();
        let pairs = edges.iter().map(|&(u, v, _)| (u, v)).collect();
        MpsGraph { n: g.n(), edges, pairs }
    }

    fn build(&self) -> Result<WeightedGraph, (MpsError, String)> {
        WeightedGraph::new(self.n, &self.edges).map_err(|e| (MpsError::InvalidArgument, e.to_string()))
    }
}

pub struct MpsSolution {
    inner: CoreSolution,
    skewness: i64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, recording its error or panic as the last error.
fn guard(f: impl FnOnce() -> Result<(), (MpsError, String)>) -> MpsError {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MpsError::Ok,
        Ok(Err((code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("panic inside the solver".into());
            MpsError::Internal
        }
    }
}

fn null() -> (MpsError, String) {
    (MpsError::NullPointer, "null pointer argument".into())
}

/// The message of the last failed call on this thread, or NULL. The string
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn mps_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a graph with `n` nodes and no edges.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn mps_graph_new(n: usize, out: *mut *mut MpsGraph) -> MpsError {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        if n == 0 {
            return Err((MpsError::InvalidArgument, "graph needs at least one node".into()));
        }
        let g = Box::new(MpsGraph { n, edges: Vec::new(), pairs: HashSet::new() });
        *out = Box::into_raw(g);
        Ok(())
    })
}

/// Parses a graph from NUL-terminated text.
///
/// # Safety
/// `text` must be a valid C string and `out` valid for writing a handle.
#[no_mangle]
pub unsafe extern "C" fn mps_graph_parse(text: *const c_char, format: MpsFormat, out: *mut *mut MpsGraph) -> MpsError {
    guard(|| {
        if text.is_null() || out.is_null() {
            return Err(null());
        }
        let text = CStr::from_ptr(text).to_str().map_err(|e| (MpsError::Parse, e.to_string()))?;
        let format = match format {
            MpsFormat::Edgelist => GraphFormat::Edgelist,
            MpsFormat::Gml => GraphFormat::Gml,
            MpsFormat::Dimacs => GraphFormat::Dimacs,
        };
        let g = parse_graph(text, format).map_err(|e| (MpsError::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(MpsGraph::from_graph(&g)));
        Ok(())
    })
}

/// Adds the edge `{u, v}` with a positive weight. Its id, the number of
/// edges added before it, is written to `out_edge` unless that is NULL.
///
/// # Safety
/// `g` must be a live graph handle; `out_edge` NULL or valid for writing.
#[no_mangle]
pub unsafe extern "C" fn mps_graph_add_edge(
    g: *mut MpsGraph,
    u: usize,
    v: usize,
    weight: i64,
    out_edge: *mut usize,
) -> MpsError {
    guard(|| {
        let g = g.as_mut().ok_or_else(null)?;
        let bad = |m: String| Err((MpsError::InvalidArgument, m));
        if u >= g.n || v >= g.n {
            return bad(format!("edge {{{u}, {v}}} out of range for {} nodes", g.n));
        }
        if u == v {
            return bad(format!("self-loop at node {u}"));
        }
        if weight < 1 {
            return bad(format!("weight {weight} is not positive"));
        }
        if !g.pairs.insert((u.min(v), u.max(v))) {
            return bad(format!("duplicate edge {{{u}, {v}}}"));
        }
        if !out_edge.is_null() {
            *out_edge = g.edges.len();
        }
        g.edges.push((u, v, weight));
        Ok(())
    })
}

/// # Safety
/// `g` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn mps_graph_num_nodes(g: *const MpsGraph) -> usize {
    g.as_ref().map_or(0, |g| g.n)
}

/// # Safety
/// `g` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn mps_graph_num_edges(g: *const MpsGraph) -> usize {
    g.as_ref().map_or(0, |g| g.edges.len())
}

/// # Safety
/// `g` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mps_graph_free(g: *mut MpsGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Solves the maximum planar subgraph problem. A `time_limit_s` of zero or
/// less means no limit. A time limit still yields a solution, with a
/// non-optimal status.
///
/// # Safety
/// `g` must be a live graph handle and `out` valid for writing a handle.
#[no_mangle]
pub unsafe extern "C" fn mps_solve(
    g: *const MpsGraph,
    formulation: MpsFormulation,
    time_limit_s: f64,
    out: *mut *mut MpsSolution,
) -> MpsError {
    guard(|| {
        let g = g.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let graph = g.build()?;
        let mut cfg = SolveConfig {
            formulation: match formulation {
                MpsFormulation::Kuratowski => Formulation::Kuratowski,
                MpsFormulation::FacialWalks => Formulation::FacialWalks,
                MpsFormulation::Schnyder => Formulation::Schnyder,
                MpsFormulation::LeftRight => Formulation::LeftRight,
            },
            ..Default::default()
        };
        cfg.limits.time = if time_limit_s > 0.0 {
            Some(Duration::try_from_secs_f64(time_limit_s).map_err(|e| (MpsError::InvalidArgument, e.to_string()))?)
        } else {
            None
        };
        let sol = solve_mps(&graph, &cfg).map_err(|e| (MpsError::Internal, e.to_string()))?;
        let skewness = sol.skewness(&graph);
        *out = Box::into_raw(Box::new(MpsSolution { inner: sol, skewness }));
        Ok(())
    })
}

/// # Safety
/// `s` must be a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn mps_solution_status(s: *const MpsSolution) -> MpsSolveStatus {
    match (*s).inner.status {
        SolveStatus::Optimal => MpsSolveStatus::Optimal,
        SolveStatus::TimeLimit => MpsSolveStatus::TimeLimit,
        SolveStatus::NodeLimit => MpsSolveStatus::NodeLimit,
        // The pipeline reports infeasible cores as errors.
        SolveStatus::MemoryLimit | SolveStatus::Infeasible => MpsSolveStatus::MemoryLimit,
    }
}

/// Weight of the kept edges.
///
/// # Safety
/// `s` must be a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn mps_solution_objective(s: *const MpsSolution) -> i64 {
    (*s).inner.objective
}

/// # Safety
/// `s` must be a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn mps_solution_dual_bound(s: *const MpsSolution) -> i64 {
    (*s).inner.dual_bound
}

/// Weight of the deleted edges.
///
/// # Safety
/// `s` must be a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn mps_solution_skewness(s: *const MpsSolution) -> i64 {
    (*s).skewness
}

/// Writes 1 for each kept edge and 0 for each deleted one, by edge id.
/// `len` must equal the number of edges of the solved graph.
///
/// # Safety
/// `s` must be a live solution handle and `out` valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn mps_solution_selection(s: *const MpsSolution, out: *mut u8, len: usize) -> MpsError {
    guard(|| {
        let s = s.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let bits = s.inner.selection.bits();
        if len != bits.len() {
            return Err((MpsError::InvalidArgument, format!("buffer holds {len} edges, graph has {}", bits.len())));
        }
        let out = std::slice::from_raw_parts_mut(out, len);
        for (o, &b) in out.iter_mut().zip(bits) {
            *o = b as u8;
        }
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mps_solution_free(s: *mut MpsSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Exact maximum planar subgraph weight by exhaustive search, for graphs
/// with at most `max_edges` edges.
///
/// # Safety
/// `g` must be a live graph handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn mps_oracle_mps_weight(g: *const MpsGraph, max_edges: usize, out: *mut i64) -> MpsError {
    guard(|| {
        let g = g.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let graph = g.build()?;
        let (k, _) = oracle_skewness_with_limit(&graph, max_edges).map_err(|e| (MpsError::TooLarge, e.to_string()))?;
        *out = graph.total_weight() - k;
        Ok(())
    })
}
