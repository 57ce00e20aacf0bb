//! Schnyder orders: three total orders on the nodes such that every kept
//! edge lies below each non-incident node in at least one of them.

use super::{add_edge_vars, extend_by_search, install_warm_start, selection_of, FormulationError, MpsModel};
use crate::graph::{EdgeId, EdgeSelection, NodeId, WeightedGraph};
use crate::pbsolver::{BranchRule, LinearConstraint, PbModel, VarId};
use crate::planarity::is_planar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transitivity {
    Explicit,
    Lazy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchnyderConfig {
    /// No pair of nodes is ordered the same way in all three orders.
    pub intersection_constraints: bool,
    /// Pin the orders realizing the edges of one triangle (or of two
    /// adjacent edges in a triangle-free graph).
    pub symmetry_breaking: bool,
    pub transitivity: Transitivity,
}

impl Default for SchnyderConfig {
    fn default() -> Self {
        SchnyderConfig { intersection_constraints: true, symmetry_breaking: true, transitivity: Transitivity::Explicit }
    }
}

const LAZY_TRANSITIVITY_LIMIT: usize = 1000;

/// Variable ids of the order relations: `t[i][u][v]` is `u <_i v`, `None`
/// on the diagonal.
#[derive(Debug, Clone)]
pub struct OrderVars {
    t: Vec<Vec<Vec<Option<VarId>>>>,
}

impl OrderVars {
    pub fn get(&self, i: usize, u: NodeId, v: NodeId) -> VarId {
        self.t[i][u][v].expect("distinct nodes")
    }

    fn n(&self) -> usize {
        self.t[0].len()
    }
}

pub struct SchnyderModel {
    graph: WeightedGraph,
    cfg: SchnyderConfig,
    model: PbModel,
    t: OrderVars,
}

/// Lexicographically first triangle, as its nodes in increasing order.
fn first_triangle(g: &WeightedGraph) -> Option<[NodeId; 3]> {
    for u in 0..g.n() {
        for &(v, _) in g.adjacency(u).iter().filter(|&&(v, _)| v > u) {
            for &(w, _) in g.adjacency(v).iter().filter(|&&(w, _)| w > v) {
                if g.edge_between(u, w).is_some() {
                    return Some([u, v, w]);
                }
            }
        }
    }
    None
}

/// Pairs `(e_i, v_i)` for the symmetry-breaking constraints: a triangle
/// with `v_i` opposite `e_i`, or two edges `ca`, `cb` sharing the
/// smallest node `c` of degree two.
fn pinned_edges(g: &WeightedGraph) -> Vec<(EdgeId, NodeId)> {
    let e = |a, b| g.edge_between(a, b).expect("edge");
    if let Some([u, v, w]) = first_triangle(g) {
        return vec![(e(v, w), u), (e(u, w), v), (e(u, v), w)];
    }
    for c in 0..g.n() {
        if let [(a, ea), (b, eb), ..] = g.adjacency(c) {
            return vec![(*eb, *a), (*ea, *b)];
        }
    }
    Vec::new()
}

pub fn build_schnyder_model(g: &WeightedGraph, cfg: &SchnyderConfig) -> Result<SchnyderModel, FormulationError> {
    let n = g.n();
    if n < 3 {
        return Err(FormulationError::TooFewNodes);
    }
    let mut model = PbModel::new();
    let s = add_edge_vars(&mut model, g);
    let mut t = vec![vec![vec![None; n]; n]; 3];
    for (i, ti) in t.iter_mut().enumerate() {
        for u in 0..n {
            for v in (0..n).filter(|&v| v != u) {
                ti[u][v] = Some(model.add_var(format!("t_i{i}_u{u}_v{v}"), 0));
            }
        }
    }
    let t = OrderVars { t };
    // a[i][e][v], only for v not on e.
    let mut a: Vec<Vec<Vec<Option<VarId>>>> = vec![vec![vec![None; n]; g.m()]; 3];
    for (i, ai) in a.iter_mut().enumerate() {
        for (e, edge) in g.edges().iter().enumerate() {
            for v in (0..n).filter(|&v| !edge.contains(v)) {
                ai[e][v] = Some(model.add_var(format!("a_i{i}_e{e}_v{v}"), 0));
            }
        }
    }
    for (e, edge) in g.edges().iter().enumerate() {
        for v in (0..n).filter(|&v| !edge.contains(v)) {
            let terms = (0..3).map(|i| (1, a[i][e][v].unwrap())).chain([(-1, s[e])]);
            model.add_constraint(LinearConstraint::ge(terms, 0));
        }
    }
    for i in 0..3 {
        for (e, edge) in g.edges().iter().enumerate() {
            for v in (0..n).filter(|&v| !edge.contains(v)) {
                for u in [edge.u, edge.v] {
                    model.add_constraint(LinearConstraint::le([(1, a[i][e][v].unwrap()), (-1, t.get(i, u, v))], 0));
                }
            }
        }
    }
    if cfg.intersection_constraints {
        for u in 0..n {
            for v in (0..n).filter(|&v| v != u) {
                model.add_constraint(LinearConstraint::le((0..3).map(|i| (1, t.get(i, u, v))), 2));
            }
        }
    }
    if cfg.transitivity == Transitivity::Explicit {
        for i in 0..3 {
            for u in 0..n {
                for v in (0..n).filter(|&v| v != u) {
                    for w in (0..n).filter(|&w| w != u && w != v) {
                        model.add_constraint(transitivity(&t, i, u, v, w));
                    }
                }
            }
        }
    }
    for i in 0..3 {
        for u in 0..n {
            for v in u + 1..n {
                model.add_constraint(LinearConstraint::eq([(1, t.get(i, u, v)), (1, t.get(i, v, u))], 1));
            }
        }
    }
    if cfg.symmetry_breaking {
        for (i, (e, v)) in pinned_edges(g).into_iter().enumerate() {
            let terms = (0..3).filter(|&j| j != i).map(|j| (1, a[j][e][v].unwrap()));
            model.add_constraint(LinearConstraint::eq(terms, 0));
        }
    }
    if cfg.transitivity == Transitivity::Lazy {
        let sep_t = t.clone();
        model.set_separator(Box::new(move |x: &[bool]| separate_transitivity(&sep_t, x)));
    }
    Ok(SchnyderModel { graph: g.clone(), cfg: cfg.clone(), model, t })
}

/// `t_uv + t_vw - 1 <= t_uw` in order `i`.
fn transitivity(t: &OrderVars, i: usize, u: NodeId, v: NodeId, w: NodeId) -> LinearConstraint {
    LinearConstraint::le([(1, t.get(i, u, v)), (1, t.get(i, v, w)), (-1, t.get(i, u, w))], 1)
}

/// Violated transitivity constraints in `(i, u, v, w)` order, at most 1000.
pub fn separate_transitivity(t: &OrderVars, x: &[bool]) -> Vec<LinearConstraint> {
    let n = t.n();
    let mut out = Vec::new();
    for i in 0..3 {
        for u in 0..n {
            for v in (0..n).filter(|&v| v != u) {
                if !x[t.get(i, u, v)] {
                    continue;
                }
                for w in (0..n).filter(|&w| w != u && w != v) {
                    if x[t.get(i, v, w)] && !x[t.get(i, u, w)] {
                        out.push(transitivity(t, i, u, v, w));
                        if out.len() == LAZY_TRANSITIVITY_LIMIT {
                            return out;
                        }
                    }
                }
            }
        }
    }
    out
}

impl SchnyderModel {
    pub fn order_vars(&self) -> &OrderVars {
        &self.t
    }

    /// The three orders as node lists, smallest first. Errors unless each
    /// relation is a strict total order.
    pub fn orders(&self, x: &[bool]) -> Result<[Vec<NodeId>; 3], FormulationError> {
        let n = self.graph.n();
        let mut out: [Vec<NodeId>; 3] = Default::default();
        for (i, order) in out.iter_mut().enumerate() {
            // In a strict total order the rank of v is the number of nodes below it.
            let below: Vec<usize> = (0..n).map(|v| (0..n).filter(|&u| u != v && x[self.t.get(i, u, v)]).count()).collect();
            let mut nodes: Vec<NodeId> = (0..n).collect();
            nodes.sort_by_key(|&v| below[v]);
            if nodes.iter().enumerate().any(|(r, &v)| below[v] != r) {
                return Err(FormulationError::Decode(format!("order {i} is not total")));
            }
            for (r, &u) in nodes.iter().enumerate() {
                for &v in &nodes[r + 1..] {
                    if !x[self.t.get(i, u, v)] || x[self.t.get(i, v, u)] {
                        return Err(FormulationError::Decode(format!("order {i} is not transitive")));
                    }
                }
            }
            *order = nodes;
        }
        Ok(out)
    }
}

impl MpsModel for SchnyderModel {
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
        if !is_planar(&self.graph, sel) {
            return false;
        }
        let aux = build_schnyder_model(&self.graph, &self.cfg).expect("built once already").model;
        match extend_by_search(aux, sel, &mut BranchRule::Default) {
            Some(a) => install_warm_start(&mut self.model, a, "schnyder"),
            None => {
                log::info!("schnyder warm start skipped: no orders found for the heuristic selection");
                false
            }
        }
    }

    fn decode(&self, x: &[bool]) -> Result<EdgeSelection, FormulationError> {
        let g = &self.graph;
        let sel = selection_of(g, x);
        let orders = self.orders(x)?;
        let rank: Vec<Vec<usize>> = orders
            .iter()
            .map(|o| {
                let mut r = vec![0; g.n()];
                for (k, &v) in o.iter().enumerate() {
                    r[v] = k;
                }
                r
            })
            .collect();
        for e in sel.selected() {
            let edge = g.edge(e);
            for z in (0..g.n()).filter(|&z| !edge.contains(z)) {
                if !rank.iter().any(|r| r[edge.u] < r[z] && r[edge.v] < r[z]) {
                    return Err(FormulationError::Decode(format!("edge {e} is below node {z} in no order")));
                }
            }
        }
        if !is_planar(g, &sel) {
            return Err(FormulationError::Decode("selection is not planar".into()));
        }
        Ok(sel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbsolver::{solve, Limits, SolveStatus};

    fn optimum(g: &WeightedGraph, cfg: &SchnyderConfig) -> i64 {
        let mut m = build_schnyder_model(g, cfg).unwrap();
        let r = solve(m.pb_mut(), &mut BranchRule::Default, &Limits::default()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        m.decode(&r.incumbent.unwrap()).unwrap();
        r.objective.unwrap()
    }

    #[test]
    fn variable_count() {
        let g = WeightedGraph::complete(5);
        let m = build_schnyder_model(&g, &SchnyderConfig::default()).unwrap();
        assert_eq!(m.pb().num_vars(), 3 * 5 * 4 + 3 * 10 * 3 + 10);
    }

    #[test]
    fn small_optima() {
        let cfg = SchnyderConfig::default();
        assert_eq!(optimum(&WeightedGraph::complete(5), &cfg), 9);
        assert_eq!(optimum(&WeightedGraph::complete_bipartite(3, 3), &cfg), 8);
        assert_eq!(optimum(&WeightedGraph::path(4), &cfg), 3);
        let lazy = SchnyderConfig { transitivity: Transitivity::Lazy, ..Default::default() };
        assert_eq!(optimum(&WeightedGraph::complete(5), &lazy), 9);
    }

    #[test]
    fn cyclic_order_yields_three_cuts() {
        let g = WeightedGraph::complete(3);
        let m = build_schnyder_model(&g, &SchnyderConfig { transitivity: Transitivity::Lazy, ..Default::default() }).unwrap();
        let t = m.order_vars();
        let mut x = vec![false; m.pb().num_vars()];
        // Order 0: 0 < 1 < 2 < 0. Orders 1 and 2: identity.
        for (u, v) in [(0, 1), (1, 2), (2, 0)] {
            x[t.get(0, u, v)] = true;
        }
        for i in 1..3 {
            for (u, v) in [(0, 1), (1, 2), (0, 2)] {
                x[t.get(i, u, v)] = true;
            }
        }
        let cuts = separate_transitivity(t, &x);
        assert_eq!(cuts.len(), 3);
        assert!(cuts.iter().all(|c| c.terms.iter().all(|&(_, v)| m.pb().name(v).starts_with("t_i0_"))));
    }

    #[test]
    fn triangle_free_pins_two_edges() {
        let pins = pinned_edges(&WeightedGraph::complete_bipartite(3, 3));
        assert_eq!(pins.len(), 2);
        assert_eq!(pinned_edges(&WeightedGraph::complete(4)).len(), 3);
    }
}
