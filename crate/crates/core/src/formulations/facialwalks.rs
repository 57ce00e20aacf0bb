//! Facial walks: faces are traced through successor variables around each
//! node, and Euler's formula ties the number of faces to the kept edges.

use super::{add_edge_vars, install_warm_start, selection_of, FormulationError, MpsModel};
use crate::graph::{ArcId, EdgeSelection, NodeId, WeightedGraph};
use crate::pbsolver::{LinearConstraint, PbModel, VarId};
use crate::planarity::{is_planar, test_planarity, verify_embedding, CombinatorialEmbedding, PlanarityResult};

#[derive(Debug, Clone, PartialEq)]
pub struct FacialWalkConfig {
    /// Faces 0, 1 and 2 always exist.
    pub force_first_three_faces: bool,
    /// Faces are used in index order.
    pub symmetry_faces_descending: bool,
    /// Faces are numbered by their smallest arc id.
    pub order_faces_by_first_arc: bool,
    /// One orientation variable per degree-3 node instead of its nine
    /// successor variables.
    pub degree3_specialization: bool,
}

impl Default for FacialWalkConfig {
    fn default() -> Self {
        FacialWalkConfig {
            force_first_three_faces: true,
            symmetry_faces_descending: true,
            order_faces_by_first_arc: true,
            degree3_specialization: false,
        }
    }
}

impl FacialWalkConfig {
    /// Settings for models meant for an external ILP solver.
    pub fn ilp_export() -> Self {
        FacialWalkConfig { degree3_specialization: true, ..Default::default() }
    }
}

/// Successor variables around one node.
#[derive(Debug, Clone)]
enum Successors {
    /// `vars[i][j]`: the `j`-th neighbor follows the `i`-th.
    Full(Vec<Vec<VarId>>),
    /// True: neighbors in adjacency order `u0, u1, u2` are cyclically
    /// ordered that way; false: the reverse.
    Degree3(VarId),
}

pub struct FacialWalkModel {
    graph: WeightedGraph,
    model: PbModel,
    face_bound: usize,
    x: Vec<VarId>,
    c: Vec<Vec<VarId>>,
    p: Vec<Successors>,
}

/// Upper bound on the number of faces of a planar subgraph.
pub fn face_bound(g: &WeightedGraph) -> Result<usize, FormulationError> {
    let n = g.n();
    if n < 3 {
        return Err(FormulationError::TooFewNodes);
    }
    Ok(2 + g.m().min(3 * n - 6) - n)
}

fn arc_of(g: &WeightedGraph, tail: NodeId, head: NodeId) -> ArcId {
    g.arc_id(tail, head).expect("adjacent nodes")
}

pub fn build_facialwalk_model(g: &WeightedGraph, cfg: &FacialWalkConfig) -> Result<FacialWalkModel, FormulationError> {
    let fb = face_bound(g)?;
    if !g.is_connected() {
        return Err(FormulationError::Disconnected);
    }
    let n = g.n();
    let mut model = PbModel::new();
    let s = add_edge_vars(&mut model, g);
    let x: Vec<VarId> = (0..fb).map(|i| model.add_var(format!("x_f{i}"), 0)).collect();
    let c: Vec<Vec<VarId>> =
        (0..fb).map(|i| (0..2 * g.m()).map(|a| model.add_var(format!("c_f{i}_a{a}"), 0)).collect()).collect();
    let p: Vec<Successors> = (0..n)
        .map(|v| {
            let adj = g.adjacency(v);
            if cfg.degree3_specialization && adj.len() == 3 {
                Successors::Degree3(model.add_var(format!("p_v{v}"), 0))
            } else {
                Successors::Full(
                    adj.iter()
                        .map(|&(u, _)| adj.iter().map(|&(w, _)| model.add_var(format!("p_v{v}_u{u}_w{w}"), 0)).collect())
                        .collect(),
                )
            }
        })
        .collect();

    // Euler's formula on the kept edges.
    let mut euler: Vec<(i64, VarId)> = x.iter().map(|&v| (1, v)).collect();
    euler.extend(s.iter().map(|&v| (-1, v)));
    model.add_constraint(LinearConstraint::eq(euler, 2 - n as i64));
    // A connected graph with two independent cycles keeps at least three faces.
    if cfg.force_first_three_faces && g.m() > n {
        for &xi in x.iter().take(3) {
            model.add_constraint(LinearConstraint::eq([(1, xi)], 1));
        }
    }
    if cfg.symmetry_faces_descending {
        for w in x.windows(2) {
            model.add_constraint(LinearConstraint::ge([(1, w[0]), (-1, w[1])], 0));
        }
    }
    if cfg.order_faces_by_first_arc {
        for i in 1..fb {
            for a in 1..2 * g.m() {
                let earlier = c[i - 1][..a].iter().map(|&v| (-1, v));
                model.add_constraint(LinearConstraint::le(earlier.chain([(1, c[i][a])]), 0));
            }
            model.add_constraint(LinearConstraint::eq([(1, c[i][0])], 0));
        }
    }
    for i in 0..fb {
        let mut terms: Vec<(i64, VarId)> = c[i].iter().map(|&v| (1, v)).collect();
        terms.push((-3, x[i]));
        model.add_constraint(LinearConstraint::ge(terms, 0));
    }
    for i in 0..fb {
        for &ca in &c[i] {
            model.add_constraint(LinearConstraint::le([(1, ca), (-1, x[i])], 0));
        }
    }
    for a in 0..2 * g.m() {
        let mut terms: Vec<(i64, VarId)> = (0..fb).map(|i| (1, c[i][a])).collect();
        terms.push((-1, s[a / 2]));
        model.add_constraint(LinearConstraint::eq(terms, 0));
    }
    for i in 0..fb {
        for v in 0..n {
            let terms = g
                .adjacency(v)
                .iter()
                .flat_map(|&(u, _)| [(1, c[i][arc_of(g, u, v)]), (-1, c[i][arc_of(g, v, u)])]);
            model.add_constraint(LinearConstraint::eq(terms, 0));
        }
    }
    for v in 0..n {
        let adj = g.adjacency(v);
        match &p[v] {
            Successors::Full(pv) => {
                for i in 0..fb {
                    for (iu, &(u, _)) in adj.iter().enumerate() {
                        for (iw, &(w, _)) in adj.iter().enumerate() {
                            let (cin, cout) = (c[i][arc_of(g, u, v)], c[i][arc_of(g, v, w)]);
                            let pvar = pv[iu][iw];
                            model.add_constraint(LinearConstraint::ge([(1, cout), (-1, cin), (-1, pvar)], -1));
                            model.add_constraint(LinearConstraint::ge([(1, cin), (-1, cout), (-1, pvar)], -1));
                        }
                    }
                }
                for (iu, &(_, eu)) in adj.iter().enumerate() {
                    let row = pv[iu].iter().map(|&q| (1, q)).chain([(-1, s[eu])]);
                    model.add_constraint(LinearConstraint::eq(row, 0));
                    let col = pv.iter().map(|r| (1, r[iu])).chain([(-1, s[eu])]);
                    model.add_constraint(LinearConstraint::eq(col, 0));
                }
            }
            &Successors::Degree3(pv) => {
                for i in 0..fb {
                    for con in degree3_constraints(g, v, pv, &c[i], &s) {
                        model.add_constraint(con);
                    }
                }
            }
        }
    }

    let graph = g.clone();
    let sep_p = p.clone();
    model.set_separator(Box::new(move |a: &[bool]| {
        let mut cons = separate_successor_cycles_with(&graph, &sep_p, a);
        cons.extend(connectivity_cuts(&graph, &selection_of(&graph, a)));
        cons
    }));
    Ok(FacialWalkModel { graph: g.clone(), model, face_bound: fb, x, c, p })
}

/// The eight inequalities per rotation index `j` coupling faces through a
/// degree-3 node `v` with neighbors `u0, u1, u2`.
fn degree3_constraints(g: &WeightedGraph, v: NodeId, pv: VarId, ci: &[VarId], s: &[VarId]) -> Vec<LinearConstraint> {
    let adj = g.adjacency(v);
    let u = |j: usize| adj[j % 3].0;
    let sv = |j: usize| s[adj[j % 3].1];
    let inn = |j: usize| ci[arc_of(g, u(j), v)];
    let out = |j: usize| ci[arc_of(g, v, u(j))];
    let mut cons = Vec::with_capacity(24);
    for j in 0..3 {
        let (s1, s2, s0) = (sv(j + 1), sv(j + 2), sv(j));
        // p = 1: the successor of u_j is u_{j+1}, or u_{j+2} when u_{j+1} is gone.
        cons.push(LinearConstraint::ge([(1, out(j + 1)), (-1, inn(j)), (-1, pv), (-1, s1)], -2));
        cons.push(LinearConstraint::ge([(1, out(j + 2)), (-1, inn(j)), (-1, pv), (-1, s2), (1, s1)], -2));
        cons.push(LinearConstraint::ge([(1, inn(j)), (-1, out(j + 1)), (-1, pv), (-1, s0)], -2));
        cons.push(LinearConstraint::ge([(1, inn(j)), (-1, out(j + 2)), (-1, pv), (-1, s0), (1, s1)], -2));
        // p = 0: the reverse order.
        cons.push(LinearConstraint::ge([(1, out(j)), (-1, inn(j + 1)), (1, pv), (-1, s0)], -1));
        cons.push(LinearConstraint::ge([(1, out(j)), (-1, inn(j + 2)), (1, pv), (-1, s0), (1, s1)], -1));
        cons.push(LinearConstraint::ge([(1, inn(j + 1)), (-1, out(j)), (1, pv), (-1, s1)], -1));
        cons.push(LinearConstraint::ge([(1, inn(j + 2)), (-1, out(j)), (1, pv), (-1, s2), (1, s1)], -1));
    }
    cons
}

/// Successor of each selected neighbor position at `v`, `None` if the
/// assignment gives it none.
fn successor_map(g: &WeightedGraph, v: NodeId, succ: &Successors, a: &[bool]) -> Vec<Option<usize>> {
    let adj = g.adjacency(v);
    let sel: Vec<bool> = adj.iter().map(|&(_, e)| a[e]).collect();
    match succ {
        Successors::Full(pv) => (0..adj.len())
            .map(|i| if sel[i] { (0..adj.len()).find(|&j| a[pv[i][j]]) } else { None })
            .collect(),
        &Successors::Degree3(q) => (0..3)
            .map(|j| {
                if !sel[j] {
                    return None;
                }
                let order = if a[q] { [j + 1, j + 2] } else { [j + 2, j + 1] };
                Some(order.iter().map(|k| k % 3).find(|&k| sel[k]).unwrap_or(j))
            })
            .collect(),
    }
}

/// Cycles of the successor permutation at `v`, as neighbor positions.
fn successor_cycles(next: &[Option<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; next.len()];
    let mut cycles = Vec::new();
    for start in 0..next.len() {
        if seen[start] || next[start].is_none() {
            continue;
        }
        let mut cyc = Vec::new();
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cyc.push(cur);
            match next[cur] {
                Some(nx) => cur = nx,
                None => break,
            }
        }
        cycles.push(cyc);
    }
    cycles
}

fn separate_successor_cycles_with(g: &WeightedGraph, p: &[Successors], a: &[bool]) -> Vec<LinearConstraint> {
    let mut cons = Vec::new();
    for v in 0..g.n() {
        let Successors::Full(pv) = &p[v] else { continue };
        let adj = g.adjacency(v);
        let cycles = successor_cycles(&successor_map(g, v, &p[v], a));
        if cycles.len() < 2 {
            continue;
        }
        // Positions are in adjacency order, so the smallest position is the
        // smallest neighbor id.
        for cyc in &cycles[1..] {
            let inside: Vec<bool> = (0..adj.len()).map(|i| cyc.contains(&i)).collect();
            let u = *cyc.iter().min().expect("non-empty cycle");
            let ut = (0..adj.len()).find(|&i| !inside[i] && a[adj[i].1]).expect("another cycle exists");
            let mut terms: Vec<(i64, VarId)> = Vec::new();
            for i in (0..adj.len()).filter(|&i| inside[i]) {
                for j in (0..adj.len()).filter(|&j| !inside[j]) {
                    terms.push((1, pv[i][j]));
                }
            }
            terms.push((-1, adj[u].1));
            terms.push((-1, adj[ut].1));
            cons.push(LinearConstraint::ge(terms, -1));
        }
    }
    cons
}

/// Cycle cuts for a model built by `build_facialwalk_model`: for every node
/// whose successors split into several cycles, one cut per cycle but the
/// first.
pub fn separate_successor_cycles(model: &FacialWalkModel, assignment: &[bool]) -> Vec<LinearConstraint> {
    separate_successor_cycles_with(&model.graph, &model.p, assignment)
}

/// Cuts `sum(s_e, e leaving W) >= 1` for every component `W` of the
/// selection but the one holding node 0. A heavier connected planar
/// subgraph always exists, so these keep an optimum; without them Euler's
/// formula alone admits disconnected selections of higher genus.
fn connectivity_cuts(g: &WeightedGraph, sel: &EdgeSelection) -> Vec<LinearConstraint> {
    let comps = g.components_of(sel);
    if comps.len() < 2 {
        return Vec::new();
    }
    let mut side = vec![usize::MAX; g.n()];
    for (i, comp) in comps.iter().enumerate() {
        for &v in comp {
            side[v] = i;
        }
    }
    let root = side[0];
    (0..comps.len())
        .filter(|&i| i != root)
        .map(|i| {
            let cut = (0..g.m()).filter(|&e| (side[g.edge(e).u] == i) != (side[g.edge(e).v] == i));
            LinearConstraint::ge(cut.map(|e| (1, e)), 1)
        })
        .collect()
}

impl FacialWalkModel {
    pub fn face_bound(&self) -> usize {
        self.face_bound
    }

    pub fn x_vars(&self) -> &[VarId] {
        &self.x
    }

    /// Rotation system encoded by the successor variables.
    pub fn rotation(&self, a: &[bool]) -> Result<CombinatorialEmbedding, FormulationError> {
        let g = &self.graph;
        let mut rotation = Vec::with_capacity(g.n());
        for v in 0..g.n() {
            let adj = g.adjacency(v);
            let next = successor_map(g, v, &self.p[v], a);
            let cycles = successor_cycles(&next);
            if cycles.len() > 1 {
                return Err(FormulationError::Decode(format!("successors at node {v} split into cycles")));
            }
            rotation.push(cycles.first().map(|c| c.iter().map(|&i| adj[i].0).collect()).unwrap_or_default());
        }
        Ok(CombinatorialEmbedding { rotation })
    }
}

impl MpsModel for FacialWalkModel {
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
        let g = &self.graph;
        let PlanarityResult::Planar(emb) = test_planarity(g, sel) else { return false };
        if g.components_of(sel).len() != 1 {
            return false;
        }
        let faces = emb.faces();
        if faces.len() > self.face_bound {
            return false;
        }
        let mut a = vec![false; self.model.num_vars()];
        for e in sel.selected() {
            a[e] = true;
        }
        let mut face_arcs: Vec<Vec<ArcId>> =
            faces.iter().map(|f| f.iter().map(|&(u, v)| arc_of(g, u, v)).collect()).collect();
        face_arcs.sort_by_key(|f| f.iter().min().copied());
        for (i, face) in face_arcs.iter().enumerate() {
            a[self.x[i]] = true;
            for &arc in face {
                a[self.c[i][arc]] = true;
            }
        }
        for v in 0..g.n() {
            let adj = g.adjacency(v);
            let pos = |w: NodeId| adj.iter().position(|&(x, _)| x == w).expect("neighbor");
            let rot = &emb.rotation[v];
            match &self.p[v] {
                Successors::Full(pv) => {
                    for (k, &u) in rot.iter().enumerate() {
                        a[pv[pos(u)][pos(rot[(k + 1) % rot.len()])]] = true;
                    }
                }
                &Successors::Degree3(q) => {
                    // With all three kept, the rotation decides; otherwise both work.
                    a[q] = rot.len() < 3 || rot[(pos_in(rot, adj[0].0) + 1) % 3] == adj[1].0;
                }
            }
        }
        install_warm_start(&mut self.model, a, "facial walk")
    }

    fn decode(&self, a: &[bool]) -> Result<EdgeSelection, FormulationError> {
        let g = &self.graph;
        let sel = selection_of(g, a);
        let emb = self.rotation(a)?;
        let faces = verify_embedding(g, &sel, &emb).map_err(|e| FormulationError::Decode(e.to_string()))?;
        let used = self.x.iter().filter(|&&v| a[v]).count();
        if faces != used {
            return Err(FormulationError::Decode(format!("rotation has {faces} faces, model uses {used}")));
        }
        if g.n() as i64 - sel.count() as i64 + faces as i64 != 2 || !is_planar(g, &sel) {
            return Err(FormulationError::Decode("decoded embedding is not planar".into()));
        }
        Ok(sel)
    }
}

fn pos_in(rot: &[NodeId], w: NodeId) -> usize {
    rot.iter().position(|&x| x == w).expect("node in rotation")
}
