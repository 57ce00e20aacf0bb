//! Exact maximum planar subgraph solver.

// Index loops read closer to the model algebra than iterator chains.
#![allow(clippy::needless_range_loop)]

pub mod graph;
pub mod planarity;
pub mod oracle;
pub mod preprocess;
pub mod heuristics;
pub mod pbsolver;
pub mod formulations;
pub mod pipeline;
pub mod bench;
