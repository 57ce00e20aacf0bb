//! Primal heuristic: a greedy triangle cactus grown to a maximal planar
//! subgraph.
//!
//! Two starts are augmented to maximality and the heavier result is kept:
//! the cactus of heavy edge-disjoint triangles, and a maximum-weight
//! spanning tree. The second start makes the spanning-tree weight a hard
//! floor for weighted inputs, where the cactus alone gives no such promise.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{selection_weight, EdgeId, EdgeSelection, NodeId, WeightedGraph};
use crate::planarity::is_planar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeuristicError {
    #[error("heuristic needs a connected graph")]
    Disconnected,
    #[error("selection is not planar")]
    NotPlanarInput,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Edge ids by weight descending, then id; `seed` shuffles within equal weights.
fn edge_order(g: &WeightedGraph, seed: Option<u64>) -> Vec<EdgeId> {
    let mut order: Vec<EdgeId> = (0..g.m()).collect();
    if let Some(s) = seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
        order.sort_by_key(|&e| -g.weight(e));
    } else {
        order.sort_by_key(|&e| (-g.weight(e), e));
    }
    order
}

fn triangles(g: &WeightedGraph) -> Vec<[NodeId; 3]> {
    let mut out = Vec::new();
    for u in 0..g.n() {
        for &(v, _) in g.adjacency(u).iter().filter(|&&(v, _)| v > u) {
            for &(w, _) in g.adjacency(v).iter().filter(|&&(w, _)| w > v) {
                if g.edge_between(u, w).is_some() {
                    out.push([u, v, w]);
                }
            }
        }
    }
    out
}

fn triangle_edges(g: &WeightedGraph, t: [NodeId; 3]) -> [EdgeId; 3] {
    let e = |a, b| g.edge_between(a, b).expect("triangle edge");
    [e(t[0], t[1]), e(t[1], t[2]), e(t[0], t[2])]
}

/// Packs edge-disjoint triangles whose union is a cactus: a triangle is
/// taken only if it joins three different components of the packing.
pub fn triangle_cactus(g: &WeightedGraph, seed: Option<u64>) -> EdgeSelection {
    let mut tris = triangles(g);
    if let Some(s) = seed {
        tris.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
        tris.sort_by_key(|&t| -triangle_edges(g, t).iter().map(|&e| g.weight(e)).sum::<i64>());
    } else {
        tris.sort_by_key(|&t| (-triangle_edges(g, t).iter().map(|&e| g.weight(e)).sum::<i64>(), t));
    }
    let mut uf = UnionFind::new(g.n());
    let mut sel = EdgeSelection::none(g.m());
    for t in tris {
        let roots = [uf.find(t[0]), uf.find(t[1]), uf.find(t[2])];
        if roots[0] != roots[1] && roots[1] != roots[2] && roots[0] != roots[2] {
            uf.union(t[0], t[1]);
            uf.union(t[1], t[2]);
            for e in triangle_edges(g, t) {
                sel.set(e, true);
            }
        }
    }
    sel
}

pub fn max_spanning_forest(g: &WeightedGraph) -> EdgeSelection {
    let mut uf = UnionFind::new(g.n());
    let mut sel = EdgeSelection::none(g.m());
    for e in edge_order(g, None) {
        if uf.union(g.edge(e).u, g.edge(e).v) {
            sel.set(e, true);
        }
    }
    sel
}

/// Adds edges in the given order while the selection stays planar.
pub fn augment(g: &WeightedGraph, sel: &mut EdgeSelection, order: &[EdgeId]) {
    let cap = if g.n() >= 3 { 3 * g.n() - 6 } else { usize::MAX };
    let mut count = sel.count();
    for &e in order {
        if sel.get(e) || count + 1 > cap {
            continue;
        }
        sel.set(e, true);
        if is_planar(g, sel) {
            count += 1;
        } else {
            sel.set(e, false);
        }
    }
}

/// Maximal planar subgraph of a connected graph. `None` is fully
/// deterministic; a seed shuffles ties between equal weights.
pub fn cactus_heuristic(g: &WeightedGraph, seed: Option<u64>) -> Result<EdgeSelection, HeuristicError> {
    if !g.is_connected() {
        return Err(HeuristicError::Disconnected);
    }
    let order = edge_order(g, seed);
    let mut cactus = triangle_cactus(g, seed);
    augment(g, &mut cactus, &order);
    let mut tree = max_spanning_forest(g);
    augment(g, &mut tree, &order);
    let w = |s: &EdgeSelection| selection_weight(g, s).expect("matching length");
    Ok(if w(&tree) > w(&cactus) { tree } else { cactus })
}

/// Whether no unselected edge can be added without losing planarity.
pub fn maximality_check(g: &WeightedGraph, sel: &EdgeSelection) -> Result<bool, HeuristicError> {
    if !is_planar(g, sel) {
        return Err(HeuristicError::NotPlanarInput);
    }
    let mut probe = sel.clone();
    for e in 0..g.m() {
        if sel.get(e) {
            continue;
        }
        probe.set(e, true);
        let planar = is_planar(g, &probe);
        probe.set(e, false);
        if planar {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_keeps_everything() {
        let g = WeightedGraph::unweighted(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)]).unwrap();
        assert_eq!(cactus_heuristic(&g, None).unwrap(), EdgeSelection::all(5));
    }

    #[test]
    fn k5_gets_a_triangulation() {
        let g = WeightedGraph::complete(5);
        let sel = cactus_heuristic(&g, None).unwrap();
        assert_eq!(sel.count(), 9);
        assert_eq!(maximality_check(&g, &sel), Ok(true));
    }

    #[test]
    fn petersen_is_spanning() {
        let g = WeightedGraph::petersen();
        let sel = cactus_heuristic(&g, None).unwrap();
        assert!(is_planar(&g, &sel));
        assert!(sel.count() >= 9);
        assert_eq!(maximality_check(&g, &sel), Ok(true));
    }

    #[test]
    fn disconnected_rejected() {
        let g = WeightedGraph::cycle(3).disjoint_union(&WeightedGraph::cycle(3));
        assert_eq!(cactus_heuristic(&g, None), Err(HeuristicError::Disconnected));
    }

    #[test]
    fn maximality_examples() {
        let g = WeightedGraph::complete(5);
        let tree = EdgeSelection::from_edges(10, [0, 1, 2, 3]);
        assert_eq!(maximality_check(&g, &tree), Ok(false));
        assert_eq!(maximality_check(&g, &EdgeSelection::all(10)), Err(HeuristicError::NotPlanarInput));
        let grid = WeightedGraph::grid(3, 3);
        assert_eq!(maximality_check(&grid, &EdgeSelection::all(12)), Ok(true));
    }

    #[test]
    fn cactus_packs_disjoint_triangles() {
        let g = WeightedGraph::complete(7);
        let c = triangle_cactus(&g, None);
        // Three triangles can join seven nodes: 9 edges, a tree of triangles.
        assert_eq!(c.count(), 9);
        assert!(is_planar(&g, &c));
    }

    #[test]
    fn seeds_are_deterministic() {
        let g = WeightedGraph::complete(7);
        assert_eq!(cactus_heuristic(&g, Some(3)), cactus_heuristic(&g, Some(3)));
    }
}
