//! Planarity testing, embeddings and Kuratowski subdivisions.

mod kuratowski;
mod lr;

pub use kuratowski::{extract_kuratowskis, minimal_nonplanar, KuratowskiKind, KuratowskiSubdivision};

use thiserror::Error;

use crate::graph::{EdgeSelection, NodeId, WeightedGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanarityError {
    #[error("rotation at node {0} does not match its selected neighbors")]
    InconsistentRotation(NodeId),
    #[error("selection is planar, no Kuratowski subdivision exists")]
    NotNonPlanar,
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// Rotation system: per node, its selected neighbors in cyclic order.
/// Face tracing follows arc `(u, v)` with `(v, w)` where `w` comes right
/// after `u` in the rotation of `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorialEmbedding {
    pub rotation: Vec<Vec<NodeId>>,
}

impl CombinatorialEmbedding {
    /// Traces all faces. Each face is the list of its arcs `(tail, head)`.
    /// Assumes the rotation is consistent; see `verify_embedding`.
    pub fn faces(&self) -> Vec<Vec<(NodeId, NodeId)>> {
        let n = self.rotation.len();
        let pos: Vec<std::collections::HashMap<NodeId, usize>> = self
            .rotation
            .iter()
            .map(|r| r.iter().enumerate().map(|(i, &w)| (w, i)).collect())
            .collect();
        let mut seen: Vec<Vec<bool>> = self.rotation.iter().map(|r| vec![false; r.len()]).collect();
        let mut faces = Vec::new();
        for u in 0..n {
            for i in 0..self.rotation[u].len() {
                if seen[u][i] {
                    continue;
                }
                let mut face = Vec::new();
                let (mut a, mut b) = (u, self.rotation[u][i]);
                let mut idx = i;
                while !seen[a][idx] {
                    seen[a][idx] = true;
                    face.push((a, b));
                    let at = pos[b][&a];
                    let next = self.rotation[b][(at + 1) % self.rotation[b].len()];
                    idx = pos[b][&next];
                    a = b;
                    b = next;
                }
                faces.push(face);
            }
        }
        faces
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanarityResult {
    Planar(CombinatorialEmbedding),
    NonPlanar,
}

impl PlanarityResult {
    pub fn is_planar(&self) -> bool {
        matches!(self, PlanarityResult::Planar(_))
    }
}

fn euler_reject(g: &WeightedGraph, sel: &EdgeSelection) -> bool {
    g.n() >= 3 && sel.count() > 3 * g.n() - 6
}

/// Planarity of the subgraph formed by the selected edges.
pub fn is_planar(g: &WeightedGraph, sel: &EdgeSelection) -> bool {
    debug_assert_eq!(sel.len(), g.m());
    if euler_reject(g, sel) {
        return false;
    }
    lr::LrState::new(g, sel).test()
}

/// Tests planarity and, if planar, returns an embedding of the selection.
pub fn test_planarity(g: &WeightedGraph, sel: &EdgeSelection) -> PlanarityResult {
    debug_assert_eq!(sel.len(), g.m());
    if euler_reject(g, sel) {
        return PlanarityResult::NonPlanar;
    }
    let mut state = lr::LrState::new(g, sel);
    if !state.test() {
        return PlanarityResult::NonPlanar;
    }
    PlanarityResult::Planar(CombinatorialEmbedding { rotation: state.embed() })
}

/// Counts the faces of a rotation system over the selected edges.
///
/// Faces are counted per connected component, and an isolated node counts
/// as one face, so a planar embedding satisfies `n - m + f = 2c` for `c`
/// components (see `is_plane_embedding`).
pub fn verify_embedding(
    g: &WeightedGraph,
    sel: &EdgeSelection,
    emb: &CombinatorialEmbedding,
) -> Result<usize, PlanarityError> {
    sel.check(g)?;
    if emb.rotation.len() != g.n() {
        return Err(PlanarityError::InconsistentRotation(emb.rotation.len().min(g.n())));
    }
    for v in 0..g.n() {
        let mut expected: Vec<NodeId> =
            g.adjacency(v).iter().filter(|&&(_, e)| sel.get(e)).map(|&(w, _)| w).collect();
        let mut got = emb.rotation[v].clone();
        expected.sort_unstable();
        got.sort_unstable();
        if expected != got {
            return Err(PlanarityError::InconsistentRotation(v));
        }
    }
    let isolated = emb.rotation.iter().filter(|r| r.is_empty()).count();
    Ok(emb.faces().len() + isolated)
}

/// Whether the face count of `emb` certifies a plane embedding.
pub fn is_plane_embedding(g: &WeightedGraph, sel: &EdgeSelection, emb: &CombinatorialEmbedding) -> bool {
    match verify_embedding(g, sel, emb) {
        Ok(f) => {
            let c = g.components_of(sel).len();
            g.n() as i64 - sel.count() as i64 + f as i64 == 2 * c as i64
        }
        Err(_) => false,
    }
}
