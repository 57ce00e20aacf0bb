//! Skewness-preserving reduction to non-planar cores.
//!
//! The graph is split into blocks (biconnected components). Planar blocks
//! are kept whole. In every non-planar block, nodes of degree two are
//! suppressed: their two edges become one edge whose weight is the smaller
//! of the two, since an optimal solution deletes at most the cheaper one.
//! A node is left alone if suppressing it would create a parallel edge.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::graph::{selection_weight, EdgeId, EdgeSelection, GraphError, NodeId, WeightedGraph};
use crate::planarity::is_planar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreprocessError {
    #[error("solution for core {0} is not planar")]
    NonPlanarCoreSolution(usize),
    #[error("expected {expected} core selections, got {got}")]
    CoreCountMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Core {
    pub graph: WeightedGraph,
    /// Original node of each core node.
    pub node_map: Vec<NodeId>,
    /// Original edges (a path) represented by each core edge.
    pub edge_lift: Vec<Vec<EdgeId>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpcReduction {
    pub original_m: usize,
    pub cores: Vec<Core>,
    /// Original weight that no core solution can lose: the total weight
    /// minus the total core weight. A merged path of weight `a + b` enters
    /// its core with weight `min(a, b)`, so `max(a, b)` is secured.
    pub secured_weight: i64,
    /// Secured weight per connected component, components ordered by their
    /// smallest node.
    pub component_offsets: Vec<i64>,
}

/// Blocks as lists of edge ids, each sorted, ordered by smallest edge id.
pub fn blocks(g: &WeightedGraph) -> Vec<Vec<EdgeId>> {
    struct Dfs<'a> {
        g: &'a WeightedGraph,
        disc: Vec<usize>,
        low: Vec<usize>,
        time: usize,
        stack: Vec<EdgeId>,
        out: Vec<Vec<EdgeId>>,
    }
    impl Dfs<'_> {
        fn visit(&mut self, v: NodeId, parent_edge: Option<EdgeId>) {
            self.time += 1;
            self.disc[v] = self.time;
            self.low[v] = self.time;
            for &(w, e) in self.g.adjacency(v) {
                if Some(e) == parent_edge {
                    continue;
                }
                if self.disc[w] == 0 {
                    self.stack.push(e);
                    self.visit(w, Some(e));
                    self.low[v] = self.low[v].min(self.low[w]);
                    if self.low[w] >= self.disc[v] {
                        let mut block = Vec::new();
                        while let Some(f) = self.stack.pop() {
                            block.push(f);
                            if f == e {
                                break;
                            }
                        }
                        block.sort_unstable();
                        self.out.push(block);
                    }
                } else if self.disc[w] < self.disc[v] {
                    self.stack.push(e);
                    self.low[v] = self.low[v].min(self.disc[w]);
                }
            }
        }
    }
    let mut dfs = Dfs {
        g,
        disc: vec![0; g.n()],
        low: vec![0; g.n()],
        time: 0,
        stack: Vec::new(),
        out: Vec::new(),
    };
    for v in 0..g.n() {
        if dfs.disc[v] == 0 {
            dfs.visit(v, None);
        }
    }
    let mut out = dfs.out;
    out.sort();
    out
}

/// Suppresses degree-two nodes of one non-planar block.
fn build_core(g: &WeightedGraph, block: &[EdgeId]) -> Core {
    // Working multigraph-free edge map keyed by endpoint pair.
    let mut edges: BTreeMap<(NodeId, NodeId), (i64, Vec<EdgeId>)> = BTreeMap::new();
    let mut adj: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for &e in block {
        let ed = g.edge(e);
        edges.insert((ed.u, ed.v), (ed.weight, vec![e]));
        adj.entry(ed.u).or_default().push(ed.v);
        adj.entry(ed.v).or_default().push(ed.u);
    }
    let key = |a: NodeId, b: NodeId| (a.min(b), a.max(b));
    loop {
        let mut nodes: Vec<NodeId> = adj.keys().copied().collect();
        nodes.sort_unstable();
        let mut changed = false;
        for x in nodes {
            let Some(nb) = adj.get(&x) else { continue };
            if nb.len() != 2 {
                continue;
            }
            let (a, b) = (nb[0], nb[1]);
            if edges.contains_key(&key(a, b)) {
                continue;
            }
            let (wa, pa) = edges.remove(&key(a, x)).expect("edge to neighbor");
            let (wb, pb) = edges.remove(&key(x, b)).expect("edge to neighbor");
            let mut path = pa;
            path.extend(pb);
            edges.insert(key(a, b), (wa.min(wb), path));
            adj.remove(&x);
            for (y, z) in [(a, b), (b, a)] {
                let list = adj.get_mut(&y).expect("neighbor present");
                let i = list.iter().position(|&t| t == x).expect("x adjacent");
                list[i] = z;
            }
            changed = true;
        }
        if !changed {
            break;
        }
    }
    let mut node_map: Vec<NodeId> = adj.keys().copied().collect();
    node_map.sort_unstable();
    let local: HashMap<NodeId, NodeId> = node_map.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut triples = Vec::new();
    let mut edge_lift = Vec::new();
    for (&(u, v), (w, path)) in &edges {
        triples.push((local[&u], local[&v], *w));
        edge_lift.push(path.clone());
    }
    let graph = WeightedGraph::new(node_map.len(), &triples).expect("core is simple");
    Core { graph, node_map, edge_lift }
}

pub fn reduce(g: &WeightedGraph) -> NpcReduction {
    let comps = g.components();
    let mut comp_of = vec![0; g.n()];
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = i;
        }
    }
    let mut component_offsets = vec![0; comps.len()];
    let mut cores = Vec::new();
    for block in blocks(g) {
        let sel = EdgeSelection::from_edges(g.m(), block.iter().copied());
        if is_planar(g, &sel) {
            let c = comp_of[g.edge(block[0]).u];
            component_offsets[c] += block.iter().map(|&e| g.weight(e)).sum::<i64>();
        } else {
            let core = build_core(g, &block);
            let c = comp_of[core.node_map[0]];
            component_offsets[c] += block.iter().map(|&e| g.weight(e)).sum::<i64>() - core.graph.total_weight();
            cores.push(core);
        }
    }
    let secured_weight = component_offsets.iter().sum();
    NpcReduction { original_m: g.m(), cores, secured_weight, component_offsets }
}

impl NpcReduction {
    /// Maps planar core selections back to a planar selection of the
    /// original graph. A deleted core edge deletes the lightest edge of its
    /// path, lowest id first.
    pub fn lift(&self, g: &WeightedGraph, core_sels: &[EdgeSelection]) -> Result<EdgeSelection, PreprocessError> {
        if core_sels.len() != self.cores.len() {
            return Err(PreprocessError::CoreCountMismatch { expected: self.cores.len(), got: core_sels.len() });
        }
        let mut out = EdgeSelection::all(self.original_m);
        for (i, (core, sel)) in self.cores.iter().zip(core_sels).enumerate() {
            sel.check(&core.graph)?;
            if !is_planar(&core.graph, sel) {
                return Err(PreprocessError::NonPlanarCoreSolution(i));
            }
            for (ce, path) in core.edge_lift.iter().enumerate() {
                if !sel.get(ce) {
                    let drop = path.iter().copied().min_by_key(|&e| (g.weight(e), e)).expect("non-empty path");
                    out.set(drop, false);
                }
            }
        }
        Ok(out)
    }

    /// Weight of the lifted solution: secured weight plus the core weights.
    pub fn lifted_weight(&self, core_sels: &[EdgeSelection]) -> Result<i64, PreprocessError> {
        let mut total = self.secured_weight;
        for (core, sel) in self.cores.iter().zip(core_sels) {
            total += selection_weight(&core.graph, sel)?;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k5_with_subdivided_edge() -> WeightedGraph {
        let mut pairs: Vec<(usize, usize)> = (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
        pairs.retain(|&p| p != (0, 1));
        pairs.extend([(0, 5), (5, 1)]);
        WeightedGraph::unweighted(6, &pairs).unwrap()
    }

    #[test]
    fn planar_grid_has_no_core() {
        let g = WeightedGraph::grid(3, 4);
        let r = reduce(&g);
        assert!(r.cores.is_empty());
        assert_eq!(r.secured_weight, g.total_weight());
        assert_eq!(r.lift(&g, &[]).unwrap(), EdgeSelection::all(g.m()));
    }

    #[test]
    fn subdivided_k5_becomes_k5() {
        let g = k5_with_subdivided_edge();
        let r = reduce(&g);
        assert_eq!(r.cores.len(), 1);
        let core = &r.cores[0];
        assert_eq!(core.graph.n(), 5);
        assert_eq!(core.graph.m(), 10);
        assert!(core.graph.edges().iter().all(|e| e.weight == 1));
        assert_eq!(core.node_map, vec![0, 1, 2, 3, 4]);
        let merged = core.graph.edge_between(0, 1).unwrap();
        assert_eq!(core.edge_lift[merged].len(), 2);

        let mut sel = EdgeSelection::all(10);
        sel.set(merged, false);
        let lifted = r.lift(&g, &[sel.clone()]).unwrap();
        assert_eq!(lifted.count(), g.m() - 1);
        let dropped: Vec<_> = (0..g.m()).filter(|&e| !lifted.get(e)).collect();
        assert!(core.edge_lift[merged].contains(&dropped[0]));
        assert_eq!(r.lifted_weight(&[sel]).unwrap(), 10);
    }

    #[test]
    fn merged_weight_is_path_minimum() {
        let g = k5_with_subdivided_edge();
        let mut w = vec![1; g.m()];
        let a = g.edge_between(0, 5).unwrap();
        let b = g.edge_between(5, 1).unwrap();
        w[a] = 7;
        w[b] = 3;
        let g = g.with_weights(&w).unwrap();
        let r = reduce(&g);
        let core = &r.cores[0];
        assert_eq!(core.graph.weight(core.graph.edge_between(0, 1).unwrap()), 3);
        let mut sel = EdgeSelection::all(10);
        sel.set(core.graph.edge_between(0, 1).unwrap(), false);
        let lifted = r.lift(&g, &[sel]).unwrap();
        assert!(!lifted.get(b) && lifted.get(a));
    }

    #[test]
    fn parallel_edge_blocks_suppression() {
        // K5 plus node 5 adjacent to 0 and 1, which are already adjacent.
        let mut pairs: Vec<(usize, usize)> = (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
        pairs.extend([(0, 5), (5, 1)]);
        let g = WeightedGraph::unweighted(6, &pairs).unwrap();
        let r = reduce(&g);
        assert_eq!(r.cores.len(), 1);
        assert_eq!(r.cores[0].graph.n(), 6);
    }

    #[test]
    fn union_gives_two_cores() {
        let g = WeightedGraph::complete(5).disjoint_union(&WeightedGraph::complete_bipartite(3, 3));
        let r = reduce(&g);
        assert_eq!(r.cores.len(), 2);
        assert_eq!(r.secured_weight, 0);
        let sels: Vec<EdgeSelection> = r
            .cores
            .iter()
            .map(|c| {
                let mut s = EdgeSelection::all(c.graph.m());
                s.set(0, false);
                s
            })
            .collect();
        let lifted = r.lift(&g, &sels).unwrap();
        assert_eq!(lifted.count(), g.m() - 2);
        assert!(is_planar(&g, &lifted));
    }

    #[test]
    fn nonplanar_core_solution_rejected() {
        let g = WeightedGraph::complete(5);
        let r = reduce(&g);
        assert_eq!(
            r.lift(&g, &[EdgeSelection::all(10)]),
            Err(PreprocessError::NonPlanarCoreSolution(0))
        );
    }

    #[test]
    fn reduce_is_idempotent() {
        let g = k5_with_subdivided_edge().disjoint_union(&WeightedGraph::petersen());
        for core in reduce(&g).cores {
            let again = reduce(&core.graph);
            assert_eq!(again.cores.len(), 1);
            assert_eq!(again.cores[0].graph, core.graph);
            assert_eq!(again.secured_weight, 0);
        }
    }

    #[test]
    fn blocks_of_bowtie() {
        let g = WeightedGraph::unweighted(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        assert_eq!(blocks(&g), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }
}
