//! Left-right edge coloring: a Trémaux tree of the kept edges, its ancestor
//! order, and a red/blue coloring of the cotree edges that respects the
//! alike and opposite relations between them.

use std::collections::{BTreeMap, VecDeque};

use super::{add_edge_vars, extend_by_search, install_warm_start, selection_of, FormulationError, MpsModel};
use crate::graph::{arc_edge, ArcId, EdgeSelection, NodeId, WeightedGraph};
use crate::pbsolver::{BranchCallback, BranchRule, LinearConstraint, PbModel, SearchView, VarId};
use crate::planarity::is_planar;

#[derive(Debug, Clone, PartialEq)]
pub struct LeftRightConfig {
    /// Tree edges and deleted edges are blue.
    pub symmetry_blue: bool,
    /// Fix the root and force the tree to be the DFS tree of the kept edges.
    pub unique_tree: bool,
    pub dfs_branching: bool,
    pub max_coloring_constraints_per_round: usize,
}

impl Default for LeftRightConfig {
    fn default() -> Self {
        LeftRightConfig {
            symmetry_blue: true,
            unique_tree: true,
            dfs_branching: true,
            max_coloring_constraints_per_round: 1000,
        }
    }
}

/// A rooted spanning tree with its ancestor relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TremauxTree {
    root: NodeId,
    parent: Vec<Option<NodeId>>,
    /// `anc[a][b]`: `a` lies on the path from the root to `b`, inclusive.
    anc: Vec<Vec<bool>>,
}

impl TremauxTree {
    /// Errors unless `parent` describes a single tree.
    pub fn from_parents(parent: Vec<Option<NodeId>>) -> Result<Self, FormulationError> {
        let n = parent.len();
        let roots: Vec<NodeId> = (0..n).filter(|&v| parent[v].is_none()).collect();
        let [root] = roots[..] else {
            return Err(FormulationError::MalformedTree(format!("{} roots", roots.len())));
        };
        let mut anc = vec![vec![false; n]; n];
        for v in 0..n {
            let mut x = v;
            for _ in 0..n {
                anc[x][v] = true;
                match parent[x] {
                    Some(p) => x = p,
                    None => break,
                }
            }
            if x != root {
                return Err(FormulationError::MalformedTree(format!("node {v} is on a cycle")));
            }
            anc[root][v] = true;
        }
        Ok(TremauxTree { root, parent, anc })
    }

    /// The depth-first tree of the selection from `root`, scanning
    /// neighbors in canonical order; `None` unless the selection spans a
    /// connected graph.
    pub fn dfs(g: &WeightedGraph, sel: &EdgeSelection, root: NodeId) -> Option<Self> {
        let mut parent = vec![None; g.n()];
        let mut seen = vec![false; g.n()];
        seen[root] = true;
        let mut stack = vec![(root, 0)];
        while let Some(top) = stack.last_mut() {
            let (u, i) = *top;
            let Some(&(v, e)) = g.adjacency(u).get(i) else {
                stack.pop();
                continue;
            };
            top.1 += 1;
            if sel.get(e) && !seen[v] {
                seen[v] = true;
                parent[v] = Some(u);
                stack.push((v, 0));
            }
        }
        if seen.iter().all(|&s| s) {
            TremauxTree::from_parents(parent).ok()
        } else {
            None
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    /// `a` is `b` or an ancestor of `b`.
    pub fn is_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        self.anc[a][b]
    }

    fn below(&self, a: NodeId, b: NodeId) -> bool {
        a != b && self.anc[a][b]
    }

    pub fn meet(&self, a: NodeId, b: NodeId) -> NodeId {
        let mut x = a;
        while !self.anc[x][b] {
            x = self.parent[x].expect("root is a common ancestor");
        }
        x
    }

    pub fn is_tree_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.parent[v] == Some(u) || self.parent[u] == Some(v)
    }

    /// Tree edges are selected and every selected edge joins comparable nodes.
    pub fn is_tremaux_for(&self, g: &WeightedGraph, sel: &EdgeSelection) -> bool {
        let tree_ok = (0..g.n()).all(|v| match self.parent[v] {
            Some(p) => g.edge_between(p, v).is_some_and(|e| sel.get(e)),
            None => true,
        });
        tree_ok && sel.selected().all(|e| {
            let edge = g.edge(e);
            self.anc[edge.u][edge.v] || self.anc[edge.v][edge.u]
        })
    }

    /// Selected non-tree edges as arcs from the ancestor end, sorted by
    /// (low, top).
    pub fn cotree_arcs(&self, g: &WeightedGraph, sel: &EdgeSelection) -> Vec<ArcId> {
        let mut arcs: Vec<(NodeId, NodeId, ArcId)> = sel
            .selected()
            .filter_map(|e| {
                let edge = g.edge(e);
                let (lo, hi) = if self.anc[edge.u][edge.v] { (edge.u, edge.v) } else { (edge.v, edge.u) };
                (!self.is_tree_edge(lo, hi)).then(|| (lo, hi, g.arc_id(lo, hi).unwrap()))
            })
            .collect();
        arcs.sort_unstable();
        arcs.into_iter().map(|(_, _, a)| a).collect()
    }

    /// Smallest node id on the tree path strictly above `lo` up to `hi`.
    fn path_min(&self, lo: NodeId, hi: NodeId) -> NodeId {
        let mut best = hi;
        let mut x = hi;
        while let Some(p) = self.parent[x].filter(|&p| p != lo) {
            best = best.min(p);
            x = p;
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationKind {
    /// Alike through one other cotree edge.
    P1,
    /// Opposite through one other cotree edge.
    P2,
    /// Opposite through two other cotree edges sharing a low end.
    P3,
}

/// A forced pair of colors between cotree arcs `alpha` and `beta`, with the
/// other arcs and the tree nodes that witness it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Relation {
    pub kind: RelationKind,
    pub alpha: ArcId,
    pub beta: ArcId,
    pub gamma: ArcId,
    pub delta: Option<ArcId>,
    pub u: NodeId,
    pub v: NodeId,
    pub w: Option<NodeId>,
}

impl Relation {
    pub fn alike(&self) -> bool {
        self.kind == RelationKind::P1
    }

    pub fn holds(&self, red: &EdgeSelection) -> bool {
        (red.get(arc_edge(self.alpha)) == red.get(arc_edge(self.beta))) == self.alike()
    }
}

/// Calls `f` on every relation between the cotree arcs of `sel`; stops
/// early when `f` returns false.
pub fn for_each_relation(g: &WeightedGraph, tree: &TremauxTree, sel: &EdgeSelection, mut f: impl FnMut(Relation) -> bool) {
    let arcs = tree.cotree_arcs(g, sel);
    let c = arcs.len();
    let lo: Vec<NodeId> = arcs.iter().map(|&a| g.arc(a).tail).collect();
    let hi: Vec<NodeId> = arcs.iter().map(|&a| g.arc(a).head).collect();
    for a in 0..c {
        for b in (0..c).filter(|&b| b != a && tree.is_ancestor(lo[a], lo[b])) {
            if lo[a] == lo[b] && b < a {
                continue;
            }
            let mab = tree.meet(hi[a], hi[b]);
            if !tree.below(lo[b], mab) {
                continue;
            }
            for x in (0..c).filter(|&x| x != a && x != b && tree.below(lo[x], lo[a])) {
                let m3 = tree.meet(mab, hi[x]);
                if m3 != mab && tree.below(lo[b], m3) {
                    let rel = Relation {
                        kind: RelationKind::P1,
                        alpha: arcs[a],
                        beta: arcs[b],
                        gamma: arcs[x],
                        delta: None,
                        u: tree.path_min(lo[b], m3),
                        v: tree.path_min(m3, mab),
                        w: None,
                    };
                    if !f(rel) {
                        return;
                    }
                }
            }
        }
    }
    for a in 0..c {
        for b in (0..c).filter(|&b| tree.below(lo[a], lo[b])) {
            let mab = tree.meet(hi[a], hi[b]);
            for x in (0..c).filter(|&x| x != a && x != b && tree.below(lo[x], lo[a])) {
                let m3 = tree.meet(mab, hi[x]);
                let mbx = tree.meet(hi[b], hi[x]);
                if m3 != mbx && tree.below(lo[b], m3) {
                    let rel = Relation {
                        kind: RelationKind::P2,
                        alpha: arcs[a],
                        beta: arcs[b],
                        gamma: arcs[x],
                        delta: None,
                        u: tree.path_min(lo[b], m3),
                        v: tree.path_min(m3, mbx),
                        w: None,
                    };
                    if !f(rel) {
                        return;
                    }
                }
            }
        }
    }
    for a in 0..c {
        for b in (a + 1..c).filter(|&b| lo[b] == lo[a]) {
            let mab = tree.meet(hi[a], hi[b]);
            if !tree.below(lo[a], mab) {
                continue;
            }
            for x in (0..c).filter(|&x| x != a && x != b && tree.below(lo[x], lo[a])) {
                let max = tree.meet(hi[a], hi[x]);
                if !tree.below(mab, max) {
                    continue;
                }
                for d in (0..c).filter(|&d| d != a && d != b && d != x && lo[d] == lo[x]) {
                    let mbd = tree.meet(hi[b], hi[d]);
                    if tree.below(mab, mbd) {
                        let rel = Relation {
                            kind: RelationKind::P3,
                            alpha: arcs[a],
                            beta: arcs[b],
                            gamma: arcs[x],
                            delta: Some(arcs[d]),
                            u: tree.path_min(lo[a], mab),
                            v: tree.path_min(mab, max),
                            w: Some(tree.path_min(mab, mbd)),
                        };
                        if !f(rel) {
                            return;
                        }
                    }
                }
            }
        }
    }
}

/// A red set of cotree edges satisfying every relation, if one exists.
/// Non-cotree edges are blue.
pub fn solve_bicoloring(g: &WeightedGraph, tree: &TremauxTree, sel: &EdgeSelection) -> Option<EdgeSelection> {
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); g.m()];
    for_each_relation(g, tree, sel, |rel| {
        let (a, b) = (arc_edge(rel.alpha), arc_edge(rel.beta));
        adj[a].push((b, rel.alike()));
        adj[b].push((a, rel.alike()));
        true
    });
    let mut color: Vec<Option<bool>> = vec![None; g.m()];
    for start in 0..g.m() {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        let mut queue = VecDeque::from([start]);
        while let Some(e) = queue.pop_front() {
            let ce = color[e].unwrap();
            for &(f, alike) in &adj[e] {
                let want = ce == alike;
                match color[f] {
                    None => {
                        color[f] = Some(want);
                        queue.push_back(f);
                    }
                    Some(cf) if cf != want => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(EdgeSelection::from_bits(color.into_iter().map(|c| c == Some(true)).collect()))
}

/// Variable ids of the model besides `s_e = e`.
#[derive(Debug, Clone)]
struct Vars {
    t: Vec<VarId>,
    l: Vec<Vec<VarId>>,
    r: Vec<VarId>,
}

/// Linear expression with a constant.
#[derive(Default)]
struct Expr {
    terms: BTreeMap<VarId, i64>,
    k: i64,
}

impl Expr {
    fn add(&mut self, c: i64, v: VarId) {
        *self.terms.entry(v).or_insert(0) += c;
    }

    fn l(&mut self, vars: &Vars, c: i64, a: NodeId, b: NodeId) {
        self.add(c, vars.l[a][b]);
    }

    /// Zero iff the arc is a selected cotree edge pointing up the tree,
    /// negative otherwise.
    fn cotree(&mut self, g: &WeightedGraph, vars: &Vars, arc: ArcId) {
        let d = g.arc(arc);
        self.l(vars, 1, d.tail, d.head);
        self.add(1, arc_edge(arc));
        self.add(-1, vars.t[arc]);
        self.add(-1, vars.t[arc ^ 1]);
        self.k -= 2;
    }

    fn scaled(&self, c: i64) -> impl Iterator<Item = (i64, VarId)> + '_ {
        self.terms.iter().filter(|(_, &a)| a != 0).map(move |(&v, &a)| (c * a, v))
    }
}

/// The term that is zero exactly when the relation's configuration is
/// present and at most -1 otherwise.
fn pattern(g: &WeightedGraph, vars: &Vars, rel: &Relation) -> Expr {
    let (a, b, x) = (g.arc(rel.alpha), g.arc(rel.beta), g.arc(rel.gamma));
    let (u, v) = (rel.u, rel.v);
    let mut p = Expr::default();
    for arc in [rel.alpha, rel.beta, rel.gamma] {
        p.cotree(g, vars, arc);
    }
    p.l(vars, 1, x.tail, a.tail);
    p.l(vars, 1, u, v);
    p.k -= 2;
    match rel.kind {
        RelationKind::P1 | RelationKind::P2 => {
            p.l(vars, 1, a.tail, b.tail);
            p.l(vars, 1, b.tail, u);
            let (first, rest) = if rel.kind == RelationKind::P1 { (x.head, [a.head, b.head]) } else { (a.head, [b.head, x.head]) };
            p.l(vars, 1, u, first);
            p.l(vars, -1, v, first);
            for h in rest {
                p.l(vars, 1, v, h);
            }
            p.k -= 5;
        }
        RelationKind::P3 => {
            let delta = rel.delta.expect("P3 has four arcs");
            let w = rel.w.expect("P3 has three witnesses");
            let dd = g.arc(delta);
            p.cotree(g, vars, delta);
            p.l(vars, 1, a.tail, u);
            p.l(vars, 1, u, v);
            p.l(vars, 1, u, w);
            p.l(vars, 1, u, a.head);
            p.l(vars, 1, u, b.head);
            p.l(vars, 1, v, a.head);
            p.l(vars, -1, v, b.head);
            p.l(vars, 1, v, x.head);
            p.l(vars, -1, v, dd.head);
            p.l(vars, -1, w, a.head);
            p.l(vars, 1, w, b.head);
            p.l(vars, -1, w, x.head);
            p.l(vars, 1, w, dd.head);
            p.k -= 9;
        }
    }
    p
}

/// The pair of inequalities enforcing one relation.
fn relation_constraints(g: &WeightedGraph, vars: &Vars, rel: &Relation) -> [LinearConstraint; 2] {
    let p = pattern(g, vars, rel);
    let (ra, rb) = (vars.r[arc_edge(rel.alpha)], vars.r[arc_edge(rel.beta)]);
    if rel.alike() {
        [
            LinearConstraint::ge([(1, ra), (-1, rb)].into_iter().chain(p.scaled(-1)), p.k),
            LinearConstraint::ge([(1, rb), (-1, ra)].into_iter().chain(p.scaled(-1)), p.k),
        ]
    } else {
        [
            LinearConstraint::ge([(1, ra), (1, rb)].into_iter().chain(p.scaled(-1)), 1 + p.k),
            LinearConstraint::le([(1, ra), (1, rb)].into_iter().chain(p.scaled(1)), 1 - p.k),
        ]
    }
}

/// The tree encoded by the t-variables, checked against the order.
fn tree_of(g: &WeightedGraph, vars: &Vars, x: &[bool]) -> Result<TremauxTree, FormulationError> {
    let mut parent = vec![None; g.n()];
    for (a, arc) in g.arcs() {
        if x[vars.t[a]] {
            if parent[arc.head].is_some() {
                return Err(FormulationError::MalformedTree(format!("node {} has two parents", arc.head)));
            }
            parent[arc.head] = Some(arc.tail);
        }
    }
    let tree = TremauxTree::from_parents(parent)?;
    for u in 0..g.n() {
        for v in 0..g.n() {
            if x[vars.l[u][v]] != tree.is_ancestor(u, v) {
                return Err(FormulationError::MalformedTree(format!("order disagrees with the tree at ({u}, {v})")));
            }
        }
    }
    Ok(tree)
}

fn separate(g: &WeightedGraph, vars: &Vars, x: &[bool], limit: usize) -> Result<Vec<LinearConstraint>, FormulationError> {
    let tree = tree_of(g, vars, x)?;
    let sel = selection_of(g, x);
    let red = EdgeSelection::from_bits(vars.r.iter().map(|&v| x[v]).collect());
    let mut out = Vec::new();
    if limit == 0 {
        return Ok(out);
    }
    for_each_relation(g, &tree, &sel, |rel| {
        if !rel.holds(&red) {
            out.extend(relation_constraints(g, vars, &rel).into_iter().filter(|c| !c.is_satisfied(x)));
        }
        out.len() < limit
    });
    Ok(out)
}

pub struct LeftRightModel {
    graph: WeightedGraph,
    cfg: LeftRightConfig,
    root: NodeId,
    model: PbModel,
    vars: Vars,
}

pub fn build_leftright_model(g: &WeightedGraph, cfg: &LeftRightConfig, root: NodeId) -> Result<LeftRightModel, FormulationError> {
    let n = g.n();
    if root >= n {
        return Err(FormulationError::InvalidRoot { root, n });
    }
    if !g.is_connected() {
        return Err(FormulationError::Disconnected);
    }
    let mut model = PbModel::new();
    let s = add_edge_vars(&mut model, g);
    let t: Vec<VarId> = g.arcs().map(|(a, _)| model.add_var(format!("t_d{a}"), 0)).collect();
    let l: Vec<Vec<VarId>> =
        (0..n).map(|u| (0..n).map(|v| model.add_var(format!("l_u{u}_v{v}"), 0)).collect()).collect();
    let r: Vec<VarId> = (0..g.m()).map(|e| model.add_var(format!("r_e{e}"), 0)).collect();
    let arc = |u: NodeId, v: NodeId| g.arc_id(u, v).unwrap();

    model.add_constraint(LinearConstraint::eq(t.iter().map(|&v| (1, v)), n as i64 - 1));
    for (a, d) in g.arcs() {
        model.add_constraint(LinearConstraint::le([(1, t[a]), (-1, s[arc_edge(a)])], 0));
        model.add_constraint(LinearConstraint::le([(1, t[a]), (-1, l[d.tail][d.head])], 0));
    }
    for u in 0..n {
        let adj = g.adjacency(u);
        for (i, &(v, _)) in adj.iter().enumerate() {
            for &(w, _) in &adj[i + 1..] {
                model.add_constraint(LinearConstraint::le(
                    [(1, l[v][w]), (1, l[w][v]), (1, t[arc(u, v)]), (1, t[arc(u, w)])],
                    2,
                ));
            }
        }
    }
    for u in 0..n {
        for v in (0..n).filter(|&v| v != u) {
            for w in (0..n).filter(|&w| w != u && w != v) {
                if u < v {
                    model.add_constraint(LinearConstraint::le(
                        [(1, l[u][w]), (1, l[v][w]), (-1, l[u][v]), (-1, l[v][u])],
                        1,
                    ));
                }
                model.add_constraint(LinearConstraint::le([(1, l[u][v]), (1, l[v][w]), (-1, l[u][w])], 1));
            }
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            model.add_constraint(LinearConstraint::le([(1, l[u][v]), (1, l[v][u])], 1));
        }
        model.add_constraint(LinearConstraint::eq([(1, l[u][u])], 1));
    }
    for (e, edge) in g.edges().iter().enumerate() {
        model.add_constraint(LinearConstraint::le([(1, s[e]), (-1, l[edge.u][edge.v]), (-1, l[edge.v][edge.u])], 0));
    }
    if cfg.symmetry_blue {
        for (e, edge) in g.edges().iter().enumerate() {
            model.add_constraint(LinearConstraint::le(
                [(1, t[arc(edge.u, edge.v)]), (1, t[arc(edge.v, edge.u)]), (1, r[e])],
                1,
            ));
            model.add_constraint(LinearConstraint::le([(1, r[e]), (-1, s[e])], 0));
        }
    }
    let incoming = |v: NodeId| -> Vec<(i64, VarId)> { g.adjacency(v).iter().map(|&(w, _)| (1, t[arc(w, v)])).collect() };
    if cfg.unique_tree {
        for v in 0..n {
            model.add_constraint(LinearConstraint::eq(incoming(v), i64::from(v != root)));
        }
        for u in 0..n {
            let adj = g.adjacency(u);
            for (i, &(v, e_uv)) in adj.iter().enumerate() {
                for &(w, _) in &adj[i + 1..] {
                    model.add_constraint(LinearConstraint::le([(1, t[arc(u, w)]), (1, l[w][v]), (1, s[e_uv])], 2));
                }
            }
        }
    } else {
        // Without a fixed root the order may outgrow the tree unless every
        // node keeps at most one parent.
        for v in 0..n {
            model.add_constraint(LinearConstraint::le(incoming(v), 1));
        }
    }
    let vars = Vars { t, l, r };
    let (sep_graph, sep_vars, limit) = (g.clone(), vars.clone(), cfg.max_coloring_constraints_per_round.max(1));
    model.set_separator(Box::new(move |x: &[bool]| match separate(&sep_graph, &sep_vars, x, limit) {
        Ok(cuts) => cuts,
        Err(e) => {
            log::error!("left-right separation skipped: {e}");
            Vec::new()
        }
    }));
    Ok(LeftRightModel { graph: g.clone(), cfg: cfg.clone(), root, model, vars })
}

/// Violated coloring constraints at an integral point, at most `limit`.
pub fn separate_bicoloring(
    m: &LeftRightModel,
    assignment: &[bool],
    limit: usize,
) -> Result<Vec<LinearConstraint>, FormulationError> {
    separate(&m.graph, &m.vars, assignment, limit)
}

/// Depth-first branching: walks the non-deleted edges in DFS order from
/// the root and picks the first edge leading to a new node whose tree arc
/// is not yet fixed. Deleting the edge is tried first; if the edge is
/// already kept, its tree arc is fixed instead.
pub fn dfs_branch_rule(g: &WeightedGraph, root: NodeId, t: &[VarId], view: &SearchView) -> Option<(VarId, bool)> {
    let mut seen = vec![false; g.n()];
    seen[root] = true;
    let mut stack = vec![(root, 0)];
    while let Some(top) = stack.last_mut() {
        let (u, i) = *top;
        let Some(&(v, e)) = g.adjacency(u).get(i) else {
            stack.pop();
            continue;
        };
        top.1 += 1;
        if seen[v] || view.value(e) == Some(false) {
            continue;
        }
        let tv = t[g.arc_id(u, v).unwrap()];
        if view.value(tv) == Some(true) {
            seen[v] = true;
            stack.push((v, 0));
            continue;
        }
        return if view.is_free(e) {
            Some((e, false))
        } else if view.is_free(tv) {
            Some((tv, true))
        } else {
            None
        };
    }
    None
}

struct DfsBranching {
    graph: WeightedGraph,
    root: NodeId,
    t: Vec<VarId>,
}

impl BranchCallback for DfsBranching {
    fn choose(&mut self, view: &SearchView) -> Option<(VarId, bool)> {
        dfs_branch_rule(&self.graph, self.root, &self.t, view)
    }
}

impl LeftRightModel {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn tree(&self, x: &[bool]) -> Result<TremauxTree, FormulationError> {
        tree_of(&self.graph, &self.vars, x)
    }

    pub fn red(&self, x: &[bool]) -> EdgeSelection {
        EdgeSelection::from_bits(self.vars.r.iter().map(|&v| x[v]).collect())
    }

    pub fn t_var(&self, a: ArcId) -> VarId {
        self.vars.t[a]
    }

    pub fn l_var(&self, u: NodeId, v: NodeId) -> VarId {
        self.vars.l[u][v]
    }

    pub fn r_var(&self, e: usize) -> VarId {
        self.vars.r[e]
    }

    /// The full assignment for a selection, a tree of it and a red set.
    pub fn assignment(&self, sel: &EdgeSelection, tree: &TremauxTree, red: &EdgeSelection) -> Vec<bool> {
        let g = &self.graph;
        let mut x = vec![false; self.model.num_vars()];
        x[..g.m()].copy_from_slice(sel.bits());
        for (a, d) in g.arcs() {
            x[self.vars.t[a]] = tree.parent(d.head) == Some(d.tail);
        }
        for u in 0..g.n() {
            for v in 0..g.n() {
                x[self.vars.l[u][v]] = tree.is_ancestor(u, v);
            }
        }
        for (e, &rv) in self.vars.r.iter().enumerate() {
            x[rv] = red.get(e);
        }
        x
    }

    /// Value of a relation's pattern term at an assignment.
    pub fn pattern_value(&self, rel: &Relation, x: &[bool]) -> i64 {
        let p = pattern(&self.graph, &self.vars, rel);
        p.k + p.scaled(1).filter(|&(_, v)| x[v]).map(|(c, _)| c).sum::<i64>()
    }

    pub fn relation_constraints(&self, rel: &Relation) -> [LinearConstraint; 2] {
        relation_constraints(&self.graph, &self.vars, rel)
    }
}

impl MpsModel for LeftRightModel {
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
        let direct = TremauxTree::dfs(&self.graph, sel, self.root)
            .and_then(|tree| solve_bicoloring(&self.graph, &tree, sel).map(|red| self.assignment(sel, &tree, &red)));
        if let Some(x) = direct {
            if install_warm_start(&mut self.model, x, "left-right") {
                return true;
            }
        }
        let aux = build_leftright_model(&self.graph, &self.cfg, self.root).expect("built once already");
        let mut rule = aux.branch_rule();
        match extend_by_search(aux.model, sel, &mut rule) {
            Some(x) => install_warm_start(&mut self.model, x, "left-right"),
            None => false,
        }
    }

    fn decode(&self, x: &[bool]) -> Result<EdgeSelection, FormulationError> {
        let g = &self.graph;
        let sel = selection_of(g, x);
        let tree = self.tree(x)?;
        if !tree.is_tremaux_for(g, &sel) {
            return Err(FormulationError::Decode("tree is not a Trémaux tree of the selection".into()));
        }
        let red = self.red(x);
        let mut broken = None;
        for_each_relation(g, &tree, &sel, |rel| {
            if !rel.holds(&red) {
                broken = Some(rel);
            }
            broken.is_none()
        });
        if let Some(rel) = broken {
            return Err(FormulationError::Decode(format!("coloring breaks {rel:?}")));
        }
        if !is_planar(g, &sel) {
            return Err(FormulationError::Decode("selection is not planar".into()));
        }
        Ok(sel)
    }

    fn branch_rule(&self) -> BranchRule {
        if self.cfg.dfs_branching {
            BranchRule::Custom(Box::new(DfsBranching { graph: self.graph.clone(), root: self.root, t: self.vars.t.clone() }))
        } else {
            BranchRule::Default
        }
    }
}
