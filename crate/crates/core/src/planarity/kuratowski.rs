//! Kuratowski subdivision extraction by greedy edge deletion.
//!
//! A nonplanar edge set from which no single edge can be removed without
//! becoming planar is a subdivision of K5 or K3,3. Further subdivisions are
//! found by forbidding one edge of an already found subdivision and
//! minimizing again, breadth first.

use std::collections::{HashSet, VecDeque};

use super::{is_planar, PlanarityError};
use crate::graph::{EdgeId, EdgeSelection, NodeId, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KuratowskiKind {
    K5,
    K33,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KuratowskiSubdivision {
    pub kind: KuratowskiKind,
    /// Sorted edge ids.
    pub edges: Vec<EdgeId>,
    /// Sorted nodes of degree at least three within the subdivision.
    pub branch_nodes: Vec<NodeId>,
}

/// Shrinks a nonplanar selection to a minimal nonplanar one.
pub fn minimal_nonplanar(g: &WeightedGraph, sel: &EdgeSelection) -> EdgeSelection {
    let mut cur = sel.clone();
    let cap = if g.n() >= 3 { 3 * g.n() - 6 } else { usize::MAX };
    let mut count = cur.count();
    let edges: Vec<EdgeId> = sel.selected().collect();
    for e in edges {
        cur.set(e, false);
        // Above the Euler cap the test can be skipped.
        if count - 1 > cap || !is_planar(g, &cur) {
            count -= 1;
        } else {
            cur.set(e, true);
        }
    }
    cur
}

fn classify(g: &WeightedGraph, sel: &EdgeSelection) -> KuratowskiSubdivision {
    let mut deg = vec![0usize; g.n()];
    for e in sel.selected() {
        deg[g.edge(e).u] += 1;
        deg[g.edge(e).v] += 1;
    }
    let branch_nodes: Vec<NodeId> = (0..g.n()).filter(|&v| deg[v] >= 3).collect();
    let kind = if branch_nodes.len() == 5 && branch_nodes.iter().all(|&v| deg[v] == 4) {
        KuratowskiKind::K5
    } else if branch_nodes.len() == 6 && branch_nodes.iter().all(|&v| deg[v] == 3) {
        KuratowskiKind::K33
    } else {
        let degrees: Vec<_> = branch_nodes.iter().map(|&v| deg[v]).collect();
        panic!("minimal nonplanar edge set with branch degrees {degrees:?}");
    };
    KuratowskiSubdivision { kind, edges: sel.selected().collect(), branch_nodes }
}

/// Finds up to `limit` distinct Kuratowski subdivisions inside the selection.
pub fn extract_kuratowskis(
    g: &WeightedGraph,
    sel: &EdgeSelection,
    limit: usize,
) -> Result<Vec<KuratowskiSubdivision>, PlanarityError> {
    sel.check(g)?;
    if is_planar(g, sel) {
        return Err(PlanarityError::NotNonPlanar);
    }
    let limit = limit.max(1);
    let mut found = Vec::new();
    let mut seen: HashSet<Vec<EdgeId>> = HashSet::new();
    let mut tried: HashSet<EdgeSelection> = HashSet::new();
    let mut queue = VecDeque::from([sel.clone()]);
    let mut budget = 4 * limit + 8;
    while let Some(base) = queue.pop_front() {
        if found.len() >= limit || budget == 0 {
            break;
        }
        if !tried.insert(base.clone()) || (!found.is_empty() && is_planar(g, &base)) {
            continue;
        }
        budget -= 1;
        let k = classify(g, &minimal_nonplanar(g, &base));
        if !seen.insert(k.edges.clone()) {
            continue;
        }
        for &f in &k.edges {
            let mut next = base.clone();
            next.set(f, false);
            queue.push_back(next);
        }
        found.push(k);
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k5_yields_itself() {
        let g = WeightedGraph::complete(5);
        let ks = extract_kuratowskis(&g, &EdgeSelection::all(10), 250).unwrap();
        assert_eq!(ks.len(), 1);
        assert_eq!(ks[0].kind, KuratowskiKind::K5);
        assert_eq!(ks[0].edges.len(), 10);
    }

    #[test]
    fn k33_limit_one() {
        let g = WeightedGraph::complete_bipartite(3, 3);
        let ks = extract_kuratowskis(&g, &EdgeSelection::all(9), 1).unwrap();
        assert_eq!(ks.len(), 1);
        assert_eq!(ks[0].kind, KuratowskiKind::K33);
        assert_eq!(ks[0].branch_nodes, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn planar_selection_is_rejected() {
        let g = WeightedGraph::complete(4);
        assert_eq!(extract_kuratowskis(&g, &EdgeSelection::all(6), 3), Err(PlanarityError::NotNonPlanar));
    }

    #[test]
    fn k6_gives_many_distinct_subdivisions() {
        let g = WeightedGraph::complete(6);
        let ks = extract_kuratowskis(&g, &EdgeSelection::all(15), 250).unwrap();
        assert!(ks.len() > 10);
        let distinct: HashSet<_> = ks.iter().map(|k| k.edges.clone()).collect();
        assert_eq!(distinct.len(), ks.len());
        // K6 has one spare node, so a K5 subdivision may route one edge through it.
        assert!(ks.iter().all(|k| match k.kind {
            KuratowskiKind::K5 => k.edges.len() == 10 || k.edges.len() == 11,
            KuratowskiKind::K33 => k.edges.len() == 9,
        }));
    }
}
