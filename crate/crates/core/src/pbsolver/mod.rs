//! A 0-1 linear maximization solver with lazily separated constraints.

mod export;
mod model;
mod solver;

pub use export::{export_lp, export_opb, parse_lp, LpParseError};
pub use model::{Cmp, LazySeparator, LinearConstraint, ModelStructure, PbModel, VarId};
pub use solver::{
    solve, BranchCallback, BranchRule, Limits, SearchView, SolveError, SolveResult, SolveStats, SolveStatus,
};
