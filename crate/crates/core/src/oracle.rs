//! Brute-force ground truth for small instances.
//!
//! `oracle_skewness` deepens over the deleted weight and returns the first
//! deletion set that leaves a planar graph. The Kuratowski search functions
//! decide planarity without any planarity algorithm, by looking for branch
//! nodes joined by internally disjoint paths.

use std::collections::HashSet;

use thiserror::Error;

use crate::graph::{EdgeId, EdgeSelection, NodeId, WeightedGraph};
use crate::planarity::{is_planar, KuratowskiKind};

pub const DEFAULT_MAX_EDGES: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {m} edges, oracle limit is {limit}")]
    InstanceTooLarge { m: usize, limit: usize },
}

/// Minimum deleted weight and a witness selection of the kept edges.
pub fn oracle_skewness(g: &WeightedGraph) -> Result<(i64, EdgeSelection), OracleError> {
    oracle_skewness_with_limit(g, DEFAULT_MAX_EDGES)
}

pub fn oracle_skewness_with_limit(
    g: &WeightedGraph,
    max_edges: usize,
) -> Result<(i64, EdgeSelection), OracleError> {
    let m = g.m();
    if m > max_edges {
        return Err(OracleError::InstanceTooLarge { m, limit: max_edges });
    }
    let weights: Vec<i64> = g.edges().iter().map(|e| e.weight).collect();
    let total: i64 = weights.iter().sum();
    let mut reachable = vec![false; total as usize + 1];
    reachable[0] = true;
    for &w in &weights {
        for s in (w as usize..=total as usize).rev() {
            reachable[s] |= reachable[s - w as usize];
        }
    }
    // suffix[i] = weight of edges i.. ; bounds the DFS below.
    let mut suffix = vec![0i64; m + 1];
    for i in (0..m).rev() {
        suffix[i] = suffix[i + 1] + weights[i];
    }
    let cap = if g.n() >= 3 { 3 * g.n() - 6 } else { usize::MAX };
    for budget in 0..=total {
        if !reachable[budget as usize] {
            continue;
        }
        let mut sel = EdgeSelection::all(m);
        let mut search = Search { g, weights: &weights, suffix: &suffix, cap, sel: &mut sel };
        if search.run(0, budget, 0) {
            return Ok((budget, sel));
        }
    }
    unreachable!("deleting every edge leaves a planar graph")
}

struct Search<'a> {
    g: &'a WeightedGraph,
    weights: &'a [i64],
    suffix: &'a [i64],
    cap: usize,
    sel: &'a mut EdgeSelection,
}

impl Search<'_> {
    fn run(&mut self, i: usize, left: i64, deleted: usize) -> bool {
        if left == 0 {
            return self.g.m() - deleted <= self.cap && is_planar(self.g, self.sel);
        }
        if i == self.weights.len() || self.suffix[i] < left {
            return false;
        }
        if self.weights[i] <= left {
            self.sel.set(i, false);
            if self.run(i + 1, left - self.weights[i], deleted + 1) {
                return true;
            }
            self.sel.set(i, true);
        }
        self.run(i + 1, left, deleted)
    }
}

pub fn oracle_mps_weight(g: &WeightedGraph) -> Result<i64, OracleError> {
    let (k, _) = oracle_skewness(g)?;
    Ok(g.total_weight() - k)
}

/// Adjacency of the selected subgraph as `(neighbor, edge)` lists.
fn selected_adjacency(g: &WeightedGraph, sel: &EdgeSelection) -> Vec<Vec<(NodeId, EdgeId)>> {
    (0..g.n())
        .map(|v| g.adjacency(v).iter().copied().filter(|&(_, e)| sel.get(e)).collect())
        .collect()
}

fn choose(items: &[NodeId], k: usize) -> Vec<Vec<NodeId>> {
    fn rec(items: &[NodeId], k: usize, start: usize, cur: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

type Placement = (KuratowskiKind, Vec<NodeId>, Vec<(NodeId, NodeId)>);

/// Branch node sets and the pairs that must be joined, for every candidate
/// K5 and K3,3 placement.
fn placements(adj: &[Vec<(NodeId, EdgeId)>]) -> Vec<Placement> {
    let n = adj.len();
    let mut out = Vec::new();
    let deg4: Vec<NodeId> = (0..n).filter(|&v| adj[v].len() >= 4).collect();
    for set in choose(&deg4, 5) {
        let pairs = choose(&set, 2).into_iter().map(|p| (p[0], p[1])).collect();
        out.push((KuratowskiKind::K5, set, pairs));
    }
    let deg3: Vec<NodeId> = (0..n).filter(|&v| adj[v].len() >= 3).collect();
    for set in choose(&deg3, 6) {
        // Fix set[0] on the left side to visit each bipartition once.
        for rest in choose(&set[1..], 2) {
            let left = [set[0], rest[0], rest[1]];
            let right: Vec<NodeId> = set.iter().copied().filter(|v| !left.contains(v)).collect();
            let mut pairs = Vec::new();
            for &a in &left {
                for &b in &right {
                    pairs.push((a, b));
                }
            }
            out.push((KuratowskiKind::K33, set.clone(), pairs));
        }
    }
    out
}

struct PathSearch<'a> {
    adj: &'a [Vec<(NodeId, EdgeId)>],
    pairs: &'a [(NodeId, NodeId)],
    /// Nodes that may not be used as path interiors (branch or already used).
    blocked: Vec<bool>,
    used_edge: Vec<bool>,
    edges: Vec<EdgeId>,
    enumerate: bool,
    found: HashSet<Vec<EdgeId>>,
}

impl PathSearch<'_> {
    fn pair(&mut self, k: usize) -> bool {
        if k == self.pairs.len() {
            let mut e = self.edges.clone();
            e.sort_unstable();
            self.found.insert(e);
            return !self.enumerate;
        }
        let (a, b) = self.pairs[k];
        self.walk(k, a, b)
    }

    fn walk(&mut self, k: usize, x: NodeId, target: NodeId) -> bool {
        for i in 0..self.adj[x].len() {
            let (y, e) = self.adj[x][i];
            if self.used_edge[e] {
                continue;
            }
            if y == target {
                self.used_edge[e] = true;
                self.edges.push(e);
                let done = self.pair(k + 1);
                self.edges.pop();
                self.used_edge[e] = false;
                if done {
                    return true;
                }
            } else if !self.blocked[y] {
                self.blocked[y] = true;
                self.used_edge[e] = true;
                self.edges.push(e);
                let done = self.walk(k, y, target);
                self.edges.pop();
                self.used_edge[e] = false;
                self.blocked[y] = false;
                if done {
                    return true;
                }
            }
        }
        false
    }
}

fn search(g: &WeightedGraph, sel: &EdgeSelection, enumerate: bool) -> HashSet<Vec<EdgeId>> {
    let adj = selected_adjacency(g, sel);
    let mut found = HashSet::new();
    for (_, set, pairs) in placements(&adj) {
        let mut blocked = vec![false; g.n()];
        for &v in &set {
            blocked[v] = true;
        }
        let mut s = PathSearch {
            adj: &adj,
            pairs: &pairs,
            blocked,
            used_edge: vec![false; g.m()],
            edges: Vec::new(),
            enumerate,
            found: HashSet::new(),
        };
        s.pair(0);
        found.extend(s.found);
        if !enumerate && !found.is_empty() {
            break;
        }
    }
    found
}

/// Whether the selection contains a subdivision of K5 or K3,3. Exponential;
/// meant for graphs with at most about ten nodes.
pub fn has_kuratowski_subdivision(g: &WeightedGraph, sel: &EdgeSelection) -> bool {
    !search(g, sel, false).is_empty()
}

/// Every Kuratowski subdivision in the selection, as sorted edge id lists.
pub fn all_kuratowski_subdivisions(g: &WeightedGraph, sel: &EdgeSelection) -> HashSet<Vec<EdgeId>> {
    search(g, sel, true)
}

/// Checks that `edges` form a subdivision of K5 or K3,3 by contracting
/// degree-two paths. Returns the kind and the sorted branch nodes.
pub fn classify_subdivision(g: &WeightedGraph, edges: &[EdgeId]) -> Option<(KuratowskiKind, Vec<NodeId>)> {
    let sel = EdgeSelection::from_edges(g.m(), edges.iter().copied());
    if sel.count() != edges.len() {
        return None;
    }
    let adj = selected_adjacency(g, &sel);
    let branch: Vec<NodeId> = (0..g.n()).filter(|&v| adj[v].len() >= 3).collect();
    if (0..g.n()).any(|v| adj[v].len() == 1) {
        return None;
    }
    let mut is_branch = vec![false; g.n()];
    for &v in &branch {
        is_branch[v] = true;
    }
    let mut covered = 0;
    let mut links = HashSet::new();
    for &b in &branch {
        for &(first, e0) in &adj[b] {
            let (mut x, mut e) = (first, e0);
            let mut len = 1;
            while !is_branch[x] {
                let &(y, f) = adj[x].iter().find(|&&(_, f)| f != e)?;
                x = y;
                e = f;
                len += 1;
                if len > edges.len() {
                    return None;
                }
            }
            if x == b || !links.insert((b.min(x), b.max(x), e0.min(e), e0.max(e))) {
                if x == b {
                    return None;
                }
                continue;
            }
            covered += len;
        }
    }
    if covered != edges.len() {
        return None;
    }
    let mut pairs: Vec<(NodeId, NodeId)> = links.iter().map(|&(a, b, _, _)| (a, b)).collect();
    pairs.sort_unstable();
    let distinct = pairs.windows(2).all(|w| w[0] != w[1]);
    if !distinct {
        return None;
    }
    if branch.len() == 5 && pairs.len() == 10 && branch.iter().all(|&v| adj[v].len() == 4) {
        return Some((KuratowskiKind::K5, branch));
    }
    if branch.len() == 6 && pairs.len() == 9 && branch.iter().all(|&v| adj[v].len() == 3) {
        // Bipartite with sides of three: the side of branch[0] is its non-neighbors.
        let mut side = vec![branch[0]];
        side.extend(branch.iter().copied().filter(|&v| v != branch[0] && !pairs.contains(&(branch[0].min(v), branch[0].max(v)))));
        if side.len() == 3 && pairs.iter().all(|&(a, b)| side.contains(&a) != side.contains(&b)) {
            return Some((KuratowskiKind::K33, branch));
        }
    }
    None
}
