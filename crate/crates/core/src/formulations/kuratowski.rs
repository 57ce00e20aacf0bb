//! Kuratowski constraints: every K5 or K3,3 subdivision loses an edge.

use super::{add_edge_vars, install_warm_start, selection_of, FormulationError, MpsModel};
use crate::graph::{EdgeSelection, WeightedGraph};
use crate::pbsolver::{LinearConstraint, PbModel};
use crate::planarity::{extract_kuratowskis, is_planar, KuratowskiSubdivision};

#[derive(Debug, Clone, PartialEq)]
pub struct KuratowskiConfig {
    pub max_constraints_per_round: usize,
    pub max_extractions_per_round: usize,
    /// Rank the extracted subdivisions and keep the best; otherwise keep
    /// them in extraction order.
    pub keep_most_violated: bool,
    /// Rounding thresholds tried in turn by `separate_fractional`.
    pub rounding_thresholds: [f64; 2],
}

impl Default for KuratowskiConfig {
    fn default() -> Self {
        KuratowskiConfig {
            max_constraints_per_round: 50,
            max_extractions_per_round: 250,
            keep_most_violated: true,
            rounding_thresholds: [0.99, 0.9],
        }
    }
}

impl KuratowskiConfig {
    fn limits(&self) -> (usize, usize) {
        let keep = self.max_constraints_per_round.max(1);
        (keep, self.max_extractions_per_round.max(keep))
    }
}

pub struct KuratowskiModel {
    graph: WeightedGraph,
    model: PbModel,
}

fn constraint(k: &KuratowskiSubdivision) -> LinearConstraint {
    LinearConstraint::le(k.edges.iter().map(|&e| (1, e)), k.edges.len() as i64 - 1)
}

pub fn build_kuratowski_model(g: &WeightedGraph, cfg: &KuratowskiConfig) -> KuratowskiModel {
    let mut model = PbModel::new();
    add_edge_vars(&mut model, g);
    let graph = g.clone();
    let cfg = cfg.clone();
    model.set_separator(Box::new(move |a: &[bool]| separate_kuratowski(&graph, &cfg, &selection_of(&graph, a))));
    KuratowskiModel { graph: g.clone(), model }
}

/// Constraints for Kuratowski subdivisions inside a nonplanar selection.
/// At 0/1 points every such constraint is violated by exactly one, so the
/// ranking prefers small subdivisions, then lexicographic edge ids.
pub fn separate_kuratowski(g: &WeightedGraph, cfg: &KuratowskiConfig, sel: &EdgeSelection) -> Vec<LinearConstraint> {
    if is_planar(g, sel) {
        return Vec::new();
    }
    let (keep, extract) = cfg.limits();
    let mut found = extract_kuratowskis(g, sel, extract).expect("selection is nonplanar");
    if cfg.keep_most_violated {
        found.sort_by(|a, b| a.edges.len().cmp(&b.edges.len()).then_with(|| a.edges.cmp(&b.edges)));
    }
    found.iter().take(keep).map(constraint).collect()
}

/// Hook for an external LP solver: separates a fractional point by rounding
/// it at each threshold in turn and keeping the subdivisions whose
/// constraints the point violates, most violated first.
pub fn separate_fractional(g: &WeightedGraph, cfg: &KuratowskiConfig, x: &[f64]) -> Vec<LinearConstraint> {
    let (keep, extract) = cfg.limits();
    for &threshold in &cfg.rounding_thresholds {
        let sel = EdgeSelection::from_bits(x.iter().map(|&v| v >= threshold).collect());
        if is_planar(g, &sel) {
            continue;
        }
        let mut scored: Vec<(f64, KuratowskiSubdivision)> = extract_kuratowskis(g, &sel, extract)
            .expect("selection is nonplanar")
            .into_iter()
            .map(|k| (k.edges.iter().map(|&e| x[e]).sum::<f64>() - (k.edges.len() as f64 - 1.0), k))
            .filter(|(v, _)| *v > 1e-9)
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.edges.cmp(&b.1.edges)));
        if !scored.is_empty() {
            return scored.iter().take(keep).map(|(_, k)| constraint(k)).collect();
        }
    }
    Vec::new()
}

impl MpsModel for KuratowskiModel {
    fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    fn pb(&self) -> &PbModel {
        &self.model
    }

    fn pb_mut(&mut self) -> &mut PbModel {
        &mut self.model
    }

    fn warm_start(&mut self, sel: &EdgeSelection) -> bool {
        is_planar(&self.graph, sel) && install_warm_start(&mut self.model, sel.bits().to_vec(), "kuratowski")
    }

    fn decode(&self, assignment: &[bool]) -> Result<EdgeSelection, FormulationError> {
        let sel = selection_of(&self.graph, assignment);
        if !is_planar(&self.graph, &sel) {
            return Err(FormulationError::Decode("selection is not planar".into()));
        }
        Ok(sel)
    }
}
