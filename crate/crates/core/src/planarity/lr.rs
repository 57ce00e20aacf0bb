//! Left-right planarity test with embedding construction.
//!
//! Follows Brandes' formulation of the de Fraysseix-Rosenstiehl criterion:
//! DFS orientation with low points, a conflict-pair stack during testing,
//! and a final DFS that places back edges left or right of their tree path.
//! All per-edge state is indexed by arc id; arcs are the DFS orientation
//! of the selected edges.

use crate::graph::{ArcId, EdgeSelection, NodeId, WeightedGraph};

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Default, Debug)]
struct Interval {
    low: Option<ArcId>,
    high: Option<ArcId>,
}

impl Interval {
    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Clone, Copy, Default, Debug)]
struct ConflictPair {
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

pub(crate) struct LrState<'g> {
    g: &'g WeightedGraph,
    /// Selected neighbors per node in canonical order, as arc ids out of the node.
    adjs: Vec<Vec<ArcId>>,
    height: Vec<usize>,
    roots: Vec<NodeId>,
    parent_arc: Vec<usize>,
    oriented: Vec<bool>,
    /// DFS-oriented out-arcs per node, in orientation order.
    out: Vec<Vec<ArcId>>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting: Vec<i64>,
    refs: Vec<usize>,
    side: Vec<i64>,
    lowpt_arc: Vec<usize>,
    stack_bottom: Vec<usize>,
    stack: Vec<ConflictPair>,
    ordered: Vec<Vec<ArcId>>,
}

fn head(g: &WeightedGraph, a: ArcId) -> NodeId {
    g.arc(a).head
}

impl<'g> LrState<'g> {
    pub(crate) fn new(g: &'g WeightedGraph, sel: &EdgeSelection) -> Self {
        let n = g.n();
        let arcs = 2 * g.m();
        let adjs = (0..n)
            .map(|v| {
                g.adjacency(v)
                    .iter()
                    .filter(|&&(_, e)| sel.get(e))
                    .map(|&(w, e)| 2 * e + usize::from(v > w))
                    .collect()
            })
            .collect();
        LrState {
            g,
            adjs,
            height: vec![NONE; n],
            roots: Vec::new(),
            parent_arc: vec![NONE; n],
            oriented: vec![false; g.m()],
            out: vec![Vec::new(); n],
            lowpt: vec![0; arcs],
            lowpt2: vec![0; arcs],
            nesting: vec![0; arcs],
            refs: vec![NONE; arcs],
            side: vec![1; arcs],
            lowpt_arc: vec![NONE; arcs],
            stack_bottom: vec![0; arcs],
            stack: Vec::new(),
            ordered: vec![Vec::new(); n],
        }
    }

    /// Runs orientation and testing. Leaves the state ready for `embed`.
    pub(crate) fn test(&mut self) -> bool {
        let n = self.g.n();
        for v in 0..n {
            if self.height[v] == NONE {
                self.height[v] = 0;
                self.roots.push(v);
                self.orient(v);
            }
        }
        for v in 0..n {
            let mut list = self.out[v].clone();
            list.sort_by_key(|&a| self.nesting[a]);
            self.ordered[v] = list;
        }
        for i in 0..self.roots.len() {
            let r = self.roots[i];
            if !self.testing(r) {
                return false;
            }
        }
        true
    }

    fn orient(&mut self, v: NodeId) {
        let e = self.parent_arc[v];
        for i in 0..self.adjs[v].len() {
            let vw = self.adjs[v][i];
            if self.oriented[vw / 2] {
                continue;
            }
            self.oriented[vw / 2] = true;
            self.out[v].push(vw);
            let w = head(self.g, vw);
            self.lowpt[vw] = self.height[v];
            self.lowpt2[vw] = self.height[v];
            if self.height[w] == NONE {
                self.parent_arc[w] = vw;
                self.height[w] = self.height[v] + 1;
                self.orient(w);
            } else {
                self.lowpt[vw] = self.height[w];
            }
            self.nesting[vw] = 2 * self.lowpt[vw] as i64;
            if self.lowpt2[vw] < self.height[v] {
                self.nesting[vw] += 1;
            }
            if e != NONE {
                if self.lowpt[vw] < self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[vw]);
                    self.lowpt[e] = self.lowpt[vw];
                } else if self.lowpt[vw] > self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[vw]);
                } else {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[vw]);
                }
            }
        }
    }

    fn conflicting(&self, i: &Interval, b: ArcId) -> bool {
        match i.high {
            Some(h) => self.lowpt[h] > self.lowpt[b],
            None => false,
        }
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        if p.left.is_empty() {
            return self.lowpt[p.right.low.expect("non-empty pair")];
        }
        if p.right.is_empty() {
            return self.lowpt[p.left.low.expect("non-empty pair")];
        }
        self.lowpt[p.left.low.unwrap()].min(self.lowpt[p.right.low.unwrap()])
    }

    fn set_ref(&mut self, at: Option<ArcId>, to: Option<ArcId>) {
        if let Some(a) = at {
            self.refs[a] = to.unwrap_or(NONE);
        }
    }

    fn testing(&mut self, v: NodeId) -> bool {
        let e = self.parent_arc[v];
        let first = self.ordered[v].first().copied();
        for i in 0..self.ordered[v].len() {
            let ei = self.ordered[v][i];
            let w = head(self.g, ei);
            self.stack_bottom[ei] = self.stack.len();
            if self.parent_arc[w] == ei {
                if !self.testing(w) {
                    return false;
                }
            } else {
                self.lowpt_arc[ei] = ei;
                self.stack.push(ConflictPair {
                    left: Interval::default(),
                    right: Interval { low: Some(ei), high: Some(ei) },
                });
            }
            if self.lowpt[ei] < self.height[v] {
                if Some(ei) == first {
                    self.lowpt_arc[e] = self.lowpt_arc[ei];
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
        }
        if e != NONE {
            self.remove_back_edges(e);
        }
        true
    }

    fn add_constraints(&mut self, ei: ArcId, e: ArcId) -> bool {
        let mut p = ConflictPair::default();
        loop {
            let mut q = self.stack.pop().expect("stack holds the return edges of ei");
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            let q_low = q.right.low.expect("right interval is non-empty");
            if self.lowpt[q_low] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else {
                    self.set_ref(p.right.low, q.right.high);
                }
                p.right.low = q.right.low;
            } else {
                self.refs[q_low] = self.lowpt_arc[e];
            }
            if self.stack.len() == self.stack_bottom[ei] {
                break;
            }
        }
        while let Some(top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            self.set_ref(p.right.low, q.right.high);
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else {
                self.set_ref(p.left.low, q.left.high);
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: ArcId) {
        let u = self.g.arc(e).tail;
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != self.height[u] {
                break;
            }
            let p = self.stack.pop().unwrap();
            if let Some(l) = p.left.low {
                self.side[l] = -1;
            }
        }
        if let Some(mut p) = self.stack.pop() {
            while let Some(h) = p.left.high {
                if head(self.g, h) != u {
                    break;
                }
                p.left.high = opt(self.refs[h]);
            }
            if p.left.high.is_none() {
                if let Some(l) = p.left.low {
                    self.refs[l] = p.right.low.unwrap_or(NONE);
                    self.side[l] = -1;
                    p.left.low = None;
                }
            }
            while let Some(h) = p.right.high {
                if head(self.g, h) != u {
                    break;
                }
                p.right.high = opt(self.refs[h]);
            }
            if p.right.high.is_none() {
                if let Some(r) = p.right.low {
                    self.refs[r] = p.left.low.unwrap_or(NONE);
                    self.side[r] = -1;
                    p.right.low = None;
                }
            }
            self.stack.push(p);
        }
        if self.lowpt[e] < self.height[u] {
            let top = self.stack.last().expect("e has a return edge on the stack");
            let (hl, hr) = (top.left.high, top.right.high);
            let pick = match (hl, hr) {
                (Some(l), None) => Some(l),
                (Some(l), Some(r)) if self.lowpt[l] > self.lowpt[r] => Some(l),
                _ => hr,
            };
            self.refs[e] = pick.unwrap_or(NONE);
        }
    }

    fn sign(&mut self, e: ArcId) -> i64 {
        let mut chain = vec![e];
        while self.refs[*chain.last().unwrap()] != NONE {
            chain.push(self.refs[*chain.last().unwrap()]);
        }
        for i in (0..chain.len() - 1).rev() {
            let (a, b) = (chain[i], chain[i + 1]);
            self.side[a] *= self.side[b];
            self.refs[a] = NONE;
        }
        self.side[e]
    }

    /// Builds the rotation system after a successful `test`. Each list is a
    /// node's neighbors in counter-clockwise order.
    pub(crate) fn embed(mut self) -> Vec<Vec<NodeId>> {
        let g = self.g;
        let n = g.n();
        let arcs: Vec<ArcId> = (0..n).flat_map(|v| self.out[v].clone()).collect();
        for &a in &arcs {
            let s = self.sign(a);
            self.nesting[a] *= s;
        }
        let mut he = HalfEdges::new(g);
        for v in 0..n {
            let mut list = self.out[v].clone();
            list.sort_by_key(|&a| self.nesting[a]);
            let mut prev = None;
            for &a in &list {
                he.add_cw(v, head(g, a), prev);
                prev = Some(head(g, a));
            }
            self.ordered[v] = list;
        }
        let mut left_ref = vec![NONE; n];
        let mut right_ref = vec![NONE; n];
        for i in 0..self.roots.len() {
            let r = self.roots[i];
            self.embed_dfs(r, &mut he, &mut left_ref, &mut right_ref);
        }
        (0..n).map(|v| he.ccw_order(v)).collect()
    }

    fn embed_dfs(&self, v: NodeId, he: &mut HalfEdges, left_ref: &mut [usize], right_ref: &mut [usize]) {
        for &ei in &self.ordered[v] {
            let w = head(self.g, ei);
            if self.parent_arc[w] == ei {
                he.add_first(w, v);
                left_ref[v] = w;
                right_ref[v] = w;
                self.embed_dfs(w, he, left_ref, right_ref);
            } else if self.side[ei] == 1 {
                he.add_cw(w, v, opt(right_ref[w]));
            } else {
                he.add_ccw(w, v, opt(left_ref[w]));
                left_ref[w] = v;
            }
        }
    }
}

fn opt(x: usize) -> Option<usize> {
    if x == NONE {
        None
    } else {
        Some(x)
    }
}

/// Doubly linked cyclic neighbor lists, one per node, keyed by arc id.
struct HalfEdges<'g> {
    g: &'g WeightedGraph,
    cw: Vec<NodeId>,
    ccw: Vec<NodeId>,
    first: Vec<usize>,
}

impl<'g> HalfEdges<'g> {
    fn new(g: &'g WeightedGraph) -> Self {
        HalfEdges { g, cw: vec![NONE; 2 * g.m()], ccw: vec![NONE; 2 * g.m()], first: vec![NONE; g.n()] }
    }

    fn arc(&self, v: NodeId, w: NodeId) -> ArcId {
        self.g.arc_id(v, w).expect("half-edge of an existing edge")
    }

    fn add_cw(&mut self, v: NodeId, w: NodeId, reference: Option<NodeId>) {
        let vw = self.arc(v, w);
        match reference {
            None => {
                self.cw[vw] = w;
                self.ccw[vw] = w;
                self.first[v] = w;
            }
            Some(r) => {
                let vr = self.arc(v, r);
                let next = self.cw[vr];
                let vn = self.arc(v, next);
                self.cw[vr] = w;
                self.cw[vw] = next;
                self.ccw[vn] = w;
                self.ccw[vw] = r;
            }
        }
    }

    fn add_ccw(&mut self, v: NodeId, w: NodeId, reference: Option<NodeId>) {
        match reference {
            None => self.add_cw(v, w, None),
            Some(r) => {
                let before = self.ccw[self.arc(v, r)];
                self.add_cw(v, w, Some(before));
                if self.first[v] == r {
                    self.first[v] = w;
                }
            }
        }
    }

    fn add_first(&mut self, v: NodeId, w: NodeId) {
        let reference = opt(self.first[v]);
        self.add_ccw(v, w, reference);
    }

    fn ccw_order(&self, v: NodeId) -> Vec<NodeId> {
        let start = self.first[v];
        if start == NONE {
            return Vec::new();
        }
        let mut out = vec![start];
        let mut x = self.ccw[self.arc(v, start)];
        while x != start {
            out.push(x);
            x = self.ccw[self.arc(v, x)];
        }
        out
    }
}
