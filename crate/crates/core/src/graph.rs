//! Weighted simple graphs, arcs and edge selections.
//!
//! Node ids are dense `0..n`, edge ids dense `0..m` in input order. Every
//! edge is stored with `u < v`. The arc `u -> v` of edge `e` has id `2e`,
//! the reverse arc `v -> u` has id `2e + 1`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub type NodeId = usize;
pub type EdgeId = usize;
pub type ArcId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph needs at least one node")]
    NoNodes,
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge {{{0}, {1}}} has non-positive weight {2}")]
    NonPositiveWeight(NodeId, NodeId, i64),
    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("operation needs n >= 3, got n = {0}")]
    TooFewNodes(usize),
    #[error("selection has length {got}, graph has {expected} edges")]
    LengthMismatch { expected: usize, got: usize },
    #[error("graph is disconnected")]
    Disconnected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: i64,
}

impl Edge {
    pub fn other(&self, x: NodeId) -> NodeId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn contains(&self, x: NodeId) -> bool {
        self.u == x || self.v == x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
}

impl Arc {
    pub fn new(tail: NodeId, head: NodeId) -> Self {
        Arc { tail, head }
    }

    pub fn rev(self) -> Self {
        Arc { tail: self.head, head: self.tail }
    }

    /// The unordered endpoint pair, smaller id first.
    pub fn undirect(self) -> (NodeId, NodeId) {
        (self.tail.min(self.head), self.tail.max(self.head))
    }
}

pub fn arc_edge(a: ArcId) -> EdgeId {
    a / 2
}

pub fn arc_rev(a: ArcId) -> ArcId {
    a ^ 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    /// Per node: `(neighbor, edge id)` sorted by neighbor id.
    adjacency: Vec<Vec<(NodeId, EdgeId)>>,
    index: HashMap<(NodeId, NodeId), EdgeId>,
}

impl WeightedGraph {
    pub fn new(n: usize, weighted_edges: &[(NodeId, NodeId, i64)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoNodes);
        }
        let mut edges = Vec::with_capacity(weighted_edges.len());
        let mut index = HashMap::with_capacity(weighted_edges.len());
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b, w) in weighted_edges {
            for x in [a, b] {
                if x >= n {
                    return Err(GraphError::NodeOutOfRange { node: x, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if w < 1 {
                return Err(GraphError::NonPositiveWeight(a, b, w));
            }
            let (u, v) = (a.min(b), a.max(b));
            if index.contains_key(&(u, v)) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            let id = edges.len();
            index.insert((u, v), id);
            edges.push(Edge { u, v, weight: w });
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(WeightedGraph { n, edges, adjacency, index })
    }

    pub fn unweighted(n: usize, pairs: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        let triples: Vec<_> = pairs.iter().map(|&(u, v)| (u, v, 1)).collect();
        Self::new(n, &triples)
    }

    pub fn complete(n: usize) -> Self {
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                pairs.push((u, v));
            }
        }
        Self::unweighted(n, &pairs).expect("complete graph is simple")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let mut pairs = Vec::new();
        for u in 0..a {
            for v in a..a + b {
                pairs.push((u, v));
            }
        }
        Self::unweighted(a + b, &pairs).expect("complete bipartite graph is simple")
    }

    pub fn petersen() -> Self {
        let mut pairs = Vec::new();
        for i in 0..5 {
            pairs.push((i, (i + 1) % 5));
            pairs.push((i, i + 5));
            pairs.push((i + 5, (i + 2) % 5 + 5));
        }
        Self::unweighted(10, &pairs).expect("petersen graph is simple")
    }

    pub fn cycle(n: usize) -> Self {
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::unweighted(n, &pairs).expect("cycle needs n >= 3")
    }

    pub fn path(n: usize) -> Self {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::unweighted(n, &pairs).expect("path is simple")
    }

    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut pairs = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let x = r * cols + c;
                if c + 1 < cols {
                    pairs.push((x, x + 1));
                }
                if r + 1 < rows {
                    pairs.push((x, x + cols));
                }
            }
        }
        Self::unweighted(rows * cols, &pairs).expect("grid is simple")
    }

    /// Disjoint union, nodes of `other` shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &WeightedGraph) -> Self {
        let shift = self.n;
        let mut triples: Vec<_> = self.edges.iter().map(|e| (e.u, e.v, e.weight)).collect();
        triples.extend(other.edges.iter().map(|e| (e.u + shift, e.v + shift, e.weight)));
        Self::new(self.n + other.n, &triples).expect("union of simple graphs is simple")
    }

    pub fn with_weights(&self, weights: &[i64]) -> Result<Self, GraphError> {
        if weights.len() != self.m() {
            return Err(GraphError::LengthMismatch { expected: self.m(), got: weights.len() });
        }
        let triples: Vec<_> = self.edges.iter().zip(weights).map(|(e, &w)| (e.u, e.v, w)).collect();
        Self::new(self.n, &triples)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e]
    }

    pub fn weight(&self, e: EdgeId) -> i64 {
        self.edges[e].weight
    }

    pub fn total_weight(&self) -> i64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    /// `(neighbor, edge)` pairs in canonical order.
    pub fn adjacency(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency[v].iter().map(|&(w, _)| w)
    }

    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.index.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn arc(&self, a: ArcId) -> Arc {
        let e = self.edges[a / 2];
        if a.is_multiple_of(2) {
            Arc::new(e.u, e.v)
        } else {
            Arc::new(e.v, e.u)
        }
    }

    pub fn arc_id(&self, tail: NodeId, head: NodeId) -> Option<ArcId> {
        self.edge_between(tail, head).map(|e| 2 * e + usize::from(tail > head))
    }

    /// All `2m` arcs in id order.
    pub fn arcs(&self) -> impl Iterator<Item = (ArcId, Arc)> + '_ {
        (0..2 * self.m()).map(move |a| (a, self.arc(a)))
    }

    /// Euler's bound `3n - 6` on the edges of a simple planar graph.
    pub fn euler_cap(&self) -> Result<usize, GraphError> {
        if self.n < 3 {
            return Err(GraphError::TooFewNodes(self.n));
        }
        Ok(3 * self.n - 6)
    }

    /// Connected components as sorted node lists, ordered by smallest node.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        self.components_of(&EdgeSelection::all(self.m()))
    }

    /// Components of the graph restricted to the selected edges.
    pub fn components_of(&self, sel: &EdgeSelection) -> Vec<Vec<NodeId>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            comp[s] = id;
            let mut nodes = vec![s];
            let mut i = 0;
            while i < nodes.len() {
                let x = nodes[i];
                i += 1;
                for &(y, e) in &self.adjacency[x] {
                    if sel.get(e) && comp[y] == usize::MAX {
                        comp[y] = id;
                        nodes.push(y);
                    }
                }
            }
            nodes.sort_unstable();
            out.push(nodes);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Induced subgraph on `nodes` (kept in the given order). Returns the
    /// subgraph and, per subgraph edge, the original edge id.
    pub fn induced(&self, nodes: &[NodeId]) -> (WeightedGraph, Vec<EdgeId>) {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i;
        }
        let mut triples = Vec::new();
        let mut origin = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            if local[e.u] != usize::MAX && local[e.v] != usize::MAX {
                triples.push((local[e.u], local[e.v], e.weight));
                origin.push(id);
            }
        }
        let g = WeightedGraph::new(nodes.len().max(1), &triples).expect("induced subgraph is simple");
        (g, origin)
    }

    /// Subgraph formed by a subset of edges over all nodes. Returns it with
    /// the original id of each kept edge.
    pub fn edge_subgraph(&self, sel: &EdgeSelection) -> (WeightedGraph, Vec<EdgeId>) {
        let origin: Vec<_> = sel.selected().collect();
        let triples: Vec<_> =
            origin.iter().map(|&e| (self.edges[e].u, self.edges[e].v, self.edges[e].weight)).collect();
        (WeightedGraph::new(self.n, &triples).expect("edge subgraph is simple"), origin)
    }
}

impl fmt::Display for WeightedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "graph(n={}, m={})", self.n, self.m())
    }
}

/// 0/1 value per edge; the candidate planar subgraph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSelection {
    bits: Vec<bool>,
}

impl EdgeSelection {
    pub fn all(m: usize) -> Self {
        EdgeSelection { bits: vec![true; m] }
    }

    pub fn none(m: usize) -> Self {
        EdgeSelection { bits: vec![false; m] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        EdgeSelection { bits }
    }

    pub fn from_edges(m: usize, edges: impl IntoIterator<Item = EdgeId>) -> Self {
        let mut sel = Self::none(m);
        for e in edges {
            sel.bits[e] = true;
        }
        sel
    }

    /// Bit `i` of `mask` selects edge `i`.
    pub fn from_mask(m: usize, mask: u64) -> Self {
        EdgeSelection { bits: (0..m).map(|i| mask >> i & 1 == 1).collect() }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, e: EdgeId) -> bool {
        self.bits[e]
    }

    pub fn set(&mut self, e: EdgeId, value: bool) {
        self.bits[e] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn selected(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn check(&self, g: &WeightedGraph) -> Result<(), GraphError> {
        if self.bits.len() != g.m() {
            return Err(GraphError::LengthMismatch { expected: g.m(), got: self.bits.len() });
        }
        Ok(())
    }
}

pub fn selection_weight(g: &WeightedGraph, sel: &EdgeSelection) -> Result<i64, GraphError> {
    sel.check(g)?;
    Ok(sel.selected().map(|e| g.weight(e)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let g = WeightedGraph::new(2, &[(0, 1, 1)]).unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.adjacency(1), &[(0, 0)]);
    }

    #[test]
    fn complete_graph_has_all_pairs() {
        let g = WeightedGraph::complete(5);
        assert_eq!(g.m(), 10);
        assert!((0..5).all(|v| g.degree(v) == 4));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            WeightedGraph::new(3, &[(0, 1, 1), (0, 1, 1)]),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert_eq!(WeightedGraph::new(3, &[(1, 0, 1), (0, 1, 1)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert_eq!(WeightedGraph::new(3, &[(2, 2, 1)]), Err(GraphError::SelfLoop(2)));
        assert_eq!(WeightedGraph::new(3, &[(0, 2, 0)]), Err(GraphError::NonPositiveWeight(0, 2, 0)));
        assert_eq!(WeightedGraph::new(3, &[(0, 3, 1)]), Err(GraphError::NodeOutOfRange { node: 3, n: 3 }));
        assert_eq!(WeightedGraph::new(0, &[]), Err(GraphError::NoNodes));
    }

    #[test]
    fn endpoints_are_canonical_and_adjacency_sorted() {
        let g = WeightedGraph::new(4, &[(3, 0, 2), (2, 0, 1), (1, 0, 5)]).unwrap();
        assert_eq!(g.edge(0), Edge { u: 0, v: 3, weight: 2 });
        assert_eq!(g.adjacency(0), &[(1, 2), (2, 1), (3, 0)]);
    }

    #[test]
    fn selection_weights() {
        let k5 = WeightedGraph::complete(5);
        assert_eq!(selection_weight(&k5, &EdgeSelection::all(10)), Ok(10));
        assert_eq!(selection_weight(&k5, &EdgeSelection::none(10)), Ok(0));
        let g = WeightedGraph::new(3, &[(0, 1, 2), (1, 2, 3), (0, 2, 5)]).unwrap();
        assert_eq!(selection_weight(&g, &EdgeSelection::from_edges(3, [1])), Ok(3));
        assert_eq!(
            selection_weight(&g, &EdgeSelection::all(2)),
            Err(GraphError::LengthMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn euler_cap_values() {
        assert_eq!(WeightedGraph::complete(5).euler_cap(), Ok(9));
        assert_eq!(WeightedGraph::complete_bipartite(3, 3).euler_cap(), Ok(12));
        assert_eq!(WeightedGraph::cycle(3).euler_cap(), Ok(3));
        assert_eq!(WeightedGraph::path(2).euler_cap(), Err(GraphError::TooFewNodes(2)));
    }

    #[test]
    fn arcs_cover_each_edge_twice() {
        let g = WeightedGraph::petersen();
        assert_eq!(g.m(), 15);
        assert!((0..10).all(|v| g.degree(v) == 3));
        let mut seen = vec![0; g.m()];
        for (id, a) in g.arcs() {
            seen[arc_edge(id)] += 1;
            assert_eq!(a.rev().rev(), a);
            assert_eq!(a.undirect(), a.rev().undirect());
            assert_eq!(g.arc_id(a.tail, a.head), Some(id));
            assert_eq!(g.arc(arc_rev(id)), a.rev());
        }
        assert!(seen.iter().all(|&c| c == 2));
    }

    #[test]
    fn components_and_union() {
        let g = WeightedGraph::complete(3).disjoint_union(&WeightedGraph::path(2));
        assert_eq!(g.components(), vec![vec![0, 1, 2], vec![3, 4]]);
        assert!(!g.is_connected());
    }
}
