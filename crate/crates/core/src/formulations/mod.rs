//! The four exact models of maximum planar subgraph.
//!
//! Every model starts with one variable per edge, `s_e` with id `e`, the
//! weighted objective and the Euler bound on the number of kept edges.
//! The formulations differ in how they certify planarity of the kept edges.

pub mod facialwalks;
pub mod kuratowski;
pub mod leftright;
pub mod schnyder;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::graph::{EdgeSelection, GraphError, WeightedGraph};
use crate::pbsolver::{solve, BranchRule, Limits, LinearConstraint, PbModel, SolveError, VarId};

pub use facialwalks::{build_facialwalk_model, face_bound, separate_successor_cycles, FacialWalkConfig, FacialWalkModel};
pub use kuratowski::{build_kuratowski_model, separate_kuratowski, KuratowskiConfig, KuratowskiModel};
pub use leftright::{
    build_leftright_model, dfs_branch_rule, for_each_relation, separate_bicoloring, solve_bicoloring, LeftRightConfig,
    LeftRightModel, Relation, RelationKind, TremauxTree,
};
pub use schnyder::{build_schnyder_model, separate_transitivity, SchnyderConfig, SchnyderModel, Transitivity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formulation {
    Kuratowski,
    FacialWalks,
    Schnyder,
    LeftRight,
}

impl Formulation {
    pub const ALL: [Formulation; 4] =
        [Formulation::Kuratowski, Formulation::FacialWalks, Formulation::Schnyder, Formulation::LeftRight];

    pub fn as_str(&self) -> &'static str {
        match self {
            Formulation::Kuratowski => "kuratowski",
            Formulation::FacialWalks => "facialwalks",
            Formulation::Schnyder => "schnyder",
            Formulation::LeftRight => "leftright",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Formulation {
    type Err = FormulationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Formulation::ALL
            .into_iter()
            .find(|f| f.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| FormulationError::UnknownFormulation(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulationError {
    #[error("formulation needs at least three nodes")]
    TooFewNodes,
    #[error("formulation needs a connected graph")]
    Disconnected,
    #[error("root {root} is not a node of a graph with {n} nodes")]
    InvalidRoot { root: usize, n: usize },
    #[error("unknown formulation {0:?}")]
    UnknownFormulation(String),
    #[error("tree variables do not describe a rooted tree with its order: {0}")]
    MalformedTree(String),
    #[error("solution failed its structural check: {0}")]
    Decode(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Settings of all formulations, including every optional constraint group.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FormulationConfig {
    pub kuratowski: KuratowskiConfig,
    pub facialwalks: FacialWalkConfig,
    pub schnyder: SchnyderConfig,
    pub leftright: LeftRightConfig,
}

impl FormulationConfig {
    /// All optional symmetry-breaking groups switched off.
    pub fn without_symmetry_breaking(&self) -> Self {
        let mut c = self.clone();
        c.schnyder.symmetry_breaking = false;
        c.leftright.symmetry_blue = false;
        c.leftright.unique_tree = false;
        c
    }
}

/// A built model of one formulation for one graph.
pub trait MpsModel {
    fn graph(&self) -> &WeightedGraph;
    fn pb(&self) -> &PbModel;
    fn pb_mut(&mut self) -> &mut PbModel;

    /// Extends a planar selection to a full assignment and installs it as
    /// the warm start. Returns false, leaving the model untouched, if the
    /// extension fails.
    fn warm_start(&mut self, sel: &EdgeSelection) -> bool;

    /// Reads the selection from a solution and checks the auxiliary
    /// variables describe a planarity certificate.
    fn decode(&self, assignment: &[bool]) -> Result<EdgeSelection, FormulationError>;

    fn branch_rule(&self) -> BranchRule {
        BranchRule::Default
    }
}

/// The selection encoded by the edge variables.
pub fn selection_of(g: &WeightedGraph, assignment: &[bool]) -> EdgeSelection {
    EdgeSelection::from_bits(assignment[..g.m()].to_vec())
}

/// Adds `s_e` for every edge, in edge order, so that `s_e` has id `e`, and
/// the Euler bound when it can bind.
fn add_edge_vars(model: &mut PbModel, g: &WeightedGraph) -> Vec<VarId> {
    let s: Vec<VarId> = (0..g.m()).map(|e| model.add_var(format!("s_e{e}"), g.weight(e))).collect();
    debug_assert!(s.iter().enumerate().all(|(e, &v)| e == v));
    if g.n() >= 3 {
        model.add_constraint(LinearConstraint::le(s.iter().map(|&v| (1, v)), 3 * g.n() as i64 - 6));
    }
    s
}

/// Warm start helper: checks the assignment against the model and installs
/// it, logging when it does not fit.
fn install_warm_start(model: &mut PbModel, assignment: Vec<bool>, what: &str) -> bool {
    match model.first_violated(&assignment) {
        None => {
            model.set_warm_start(assignment);
            true
        }
        Some(i) => {
            log::info!("{what} warm start skipped: violates constraint {i}");
            false
        }
    }
}

/// Completes a selection to a full assignment by searching a fresh copy of
/// the model with the edge variables fixed and a zero objective.
fn extend_by_search(mut aux: PbModel, sel: &EdgeSelection, rule: &mut BranchRule) -> Option<Vec<bool>> {
    for e in 0..sel.len() {
        aux.add_constraint(LinearConstraint::eq([(1, e)], i64::from(sel.get(e))));
    }
    for v in 0..aux.num_vars() {
        aux.set_objective(v, 0);
    }
    let limits = Limits { time: Some(Duration::from_secs(5)), nodes: Some(200_000), memory_bytes: None };
    match solve(&mut aux, rule, &limits) {
        Ok(r) => r.incumbent,
        Err(e) => {
            log::warn!("warm start extension failed: {e}");
            None
        }
    }
}

/// Builds the model of the given formulation with the matching settings.
pub fn build_model(
    g: &WeightedGraph,
    formulation: Formulation,
    cfg: &FormulationConfig,
) -> Result<Box<dyn MpsModel>, FormulationError> {
    Ok(match formulation {
        Formulation::Kuratowski => Box::new(build_kuratowski_model(g, &cfg.kuratowski)),
        Formulation::FacialWalks => Box::new(build_facialwalk_model(g, &cfg.facialwalks)?),
        Formulation::Schnyder => Box::new(build_schnyder_model(g, &cfg.schnyder)?),
        Formulation::LeftRight => Box::new(build_leftright_model(g, &cfg.leftright, 0)?),
    })
}
