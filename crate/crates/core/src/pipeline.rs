//! End-to-end solve: reduce to non-planar cores, warm start each core from
//! the heuristic, solve it with one formulation and lift the result back.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::formulations::{build_model, Formulation, FormulationConfig, FormulationError, MpsModel};
use crate::graph::{selection_weight, EdgeSelection, GraphError, WeightedGraph};
use crate::heuristics::{cactus_heuristic, HeuristicError};
use crate::pbsolver::{solve, Limits, SolveStats, SolveStatus};
use crate::planarity::is_planar;
use crate::preprocess::{reduce, PreprocessError};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub formulation: Formulation,
    pub formulations: FormulationConfig,
    /// Limits for the whole graph; cores share the time budget.
    pub limits: Limits,
    /// Tie-breaking seed for the heuristic.
    pub seed: Option<u64>,
    pub warm_start: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            formulation: Formulation::Kuratowski,
            formulations: FormulationConfig::default(),
            limits: Limits { time: Some(Duration::from_secs(60)), memory_bytes: Some(1 << 30), nodes: None },
            seed: None,
            warm_start: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Formulation(#[from] FormulationError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("core {core}: {message}")]
    Internal { core: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpsSolution {
    /// Planar selection of the input graph.
    pub selection: EdgeSelection,
    pub objective: i64,
    pub dual_bound: i64,
    /// `Optimal` only if every core was solved to optimality.
    pub status: SolveStatus,
    /// Weight of the lifted heuristic solution.
    pub heuristic_weight: i64,
    pub cores: usize,
    /// Summed over cores.
    pub stats: SolveStats,
}

impl MpsSolution {
    pub fn skewness(&self, g: &WeightedGraph) -> i64 {
        g.total_weight() - self.objective
    }
}

/// Sum of the `3n - 6` heaviest weights: no planar subgraph keeps more.
fn euler_weight_bound(g: &WeightedGraph) -> i64 {
    let mut w: Vec<i64> = (0..g.m()).map(|e| g.weight(e)).collect();
    w.sort_unstable_by(|a, b| b.cmp(a));
    let cap = g.euler_cap().unwrap_or(g.m());
    w.iter().take(cap).filter(|&&x| x > 0).sum()
}

pub fn solve_mps(g: &WeightedGraph, cfg: &SolveConfig) -> Result<MpsSolution, PipelineError> {
    solve_mps_with(g, cfg, |_, _| {})
}

/// Like `solve_mps`, calling `inspect` with each core's model after its solve.
pub fn solve_mps_with(
    g: &WeightedGraph,
    cfg: &SolveConfig,
    mut inspect: impl FnMut(usize, &dyn MpsModel),
) -> Result<MpsSolution, PipelineError> {
    let start = Instant::now();
    let reduction = reduce(g);
    let mut status = SolveStatus::Optimal;
    let mut stats = SolveStats::default();
    let mut core_sels = Vec::with_capacity(reduction.cores.len());
    let mut heuristic_weight = reduction.secured_weight;
    let mut dual_bound = reduction.secured_weight;
    for (i, core) in reduction.cores.iter().enumerate() {
        let cg = &core.graph;
        let heuristic = cactus_heuristic(cg, cfg.seed)?;
        let h_weight = selection_weight(cg, &heuristic)?;
        heuristic_weight += h_weight;
        let mut model = build_model(cg, cfg.formulation, &cfg.formulations)?;
        if cfg.warm_start && !model.warm_start(&heuristic) {
            log::info!("core {i}: heuristic warm start not installed");
        }
        let remaining = cfg.limits.time.map(|t| t.saturating_sub(start.elapsed()));
        let limits = Limits { time: remaining, ..cfg.limits };
        let mut rule = model.branch_rule();
        let r = solve(model.pb_mut(), &mut rule, &limits)
            .map_err(|e| PipelineError::Internal { core: i, message: e.to_string() })?;
        stats.bnb_nodes += r.stats.bnb_nodes;
        stats.conflicts += r.stats.conflicts;
        stats.lazy_constraints_added += r.stats.lazy_constraints_added;
        stats.separator_calls += r.stats.separator_calls;
        inspect(i, model.as_ref());
        if r.status == SolveStatus::Infeasible {
            return Err(PipelineError::Internal { core: i, message: "model reported infeasible".into() });
        }
        let sel = match &r.incumbent {
            Some(x) => model.decode(x).map_err(|e| PipelineError::Internal { core: i, message: e.to_string() })?,
            None => heuristic.clone(),
        };
        let (sel, weight) = match selection_weight(cg, &sel)? {
            w if w >= h_weight => (sel, w),
            _ => (heuristic, h_weight),
        };
        if r.status != SolveStatus::Optimal && status == SolveStatus::Optimal {
            status = r.status;
        }
        let core_bound = if r.status == SolveStatus::Optimal { weight } else { r.dual_bound };
        dual_bound += core_bound.min(euler_weight_bound(cg)).max(weight);
        core_sels.push(sel);
    }
    let selection = reduction.lift(g, &core_sels)?;
    if !is_planar(g, &selection) {
        return Err(PipelineError::Internal { core: usize::MAX, message: "lifted selection is not planar".into() });
    }
    let objective = selection_weight(g, &selection)?;
    debug_assert_eq!(Ok(objective), reduction.lifted_weight(&core_sels));
    stats.wall_time = start.elapsed();
    Ok(MpsSolution {
        selection,
        objective,
        dual_bound,
        status,
        heuristic_weight,
        cores: reduction.cores.len(),
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(g: &WeightedGraph, f: Formulation) -> MpsSolution {
        solve_mps(g, &SolveConfig { formulation: f, ..Default::default() }).unwrap()
    }

    #[test]
    fn named_graphs() {
        for f in Formulation::ALL {
            let s = run(&WeightedGraph::complete(5), f);
            assert_eq!((s.objective, s.dual_bound, s.status), (9, 9, SolveStatus::Optimal));
            assert_eq!(run(&WeightedGraph::complete_bipartite(3, 3), f).objective, 8);
        }
    }

    #[test]
    fn planar_input_needs_no_solve() {
        let g = WeightedGraph::grid(3, 3);
        let s = run(&g, Formulation::LeftRight);
        assert_eq!(s.cores, 0);
        assert_eq!(s.objective, g.total_weight());
        assert_eq!(s.status, SolveStatus::Optimal);
    }

    #[test]
    fn weighted_k5() {
        let mut w = vec![1; 10];
        w[0] = 100;
        let g = WeightedGraph::complete(5).with_weights(&w).unwrap();
        for f in Formulation::ALL {
            let s = run(&g, f);
            assert_eq!(s.objective, 108);
            assert!(s.selection.get(0));
        }
    }

    #[test]
    fn disconnected_input_is_split() {
        let g = WeightedGraph::complete(5).disjoint_union(&WeightedGraph::complete_bipartite(3, 3));
        for f in Formulation::ALL {
            let s = run(&g, f);
            assert_eq!((s.objective, s.cores), (17, 2));
        }
    }

    #[test]
    fn time_limit_keeps_the_heuristic_floor() {
        let g = WeightedGraph::petersen();
        let cfg = SolveConfig { limits: Limits { time: Some(Duration::from_nanos(1)), ..Default::default() }, ..Default::default() };
        let s = solve_mps(&g, &cfg).unwrap();
        assert!(s.objective >= s.heuristic_weight);
        assert!(s.dual_bound >= s.objective);
    }
}
