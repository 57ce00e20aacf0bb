//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::WeightedGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("no simple {d}-regular graph on {n} nodes")]
    InfeasibleDegree { n: usize, d: usize },
    #[error("no connected simple graph with {n} nodes and {m} edges")]
    InfeasibleEdgeCount { n: usize, m: usize },
}

/// Random `d`-regular simple graph from the pairing model; pairings with a
/// loop or a repeated pair are discarded and redrawn.
pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<WeightedGraph, GenError> {
    if n == 0 || d >= n || n * d % 2 == 1 {
        return Err(GenError::InfeasibleDegree { n, d });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    loop {
        points.shuffle(&mut rng);
        let edges: Vec<(usize, usize, i64)> = points.chunks(2).map(|p| (p[0], p[1], 1)).collect();
        if let Ok(g) = WeightedGraph::new(n, &edges) {
            return Ok(g);
        }
    }
}

/// Random connected simple graph with exactly `m` unit-weight edges: a
/// random spanning tree plus uniformly drawn extra pairs.
pub fn gen_random_connected(n: usize, m: usize, seed: u64) -> Result<WeightedGraph, GenError> {
    if n == 0 || m + 1 < n || m > n * (n - 1) / 2 {
        return Err(GenError::InfeasibleEdgeCount { n, m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (order[rng.gen_range(0..i)], order[i])).collect();
    let mut rest: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !pairs.iter().any(|&(a, b)| (a.min(b), a.max(b)) == (u, v)))
        .collect();
    rest.shuffle(&mut rng);
    pairs.extend(rest.into_iter().take(m + 1 - n));
    pairs.sort_unstable_by_key(|&(a, b)| (a.min(b), a.max(b)));
    Ok(WeightedGraph::unweighted(n, &pairs).expect("distinct pairs"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_graphs() {
        let g = gen_random_regular(6, 3, 1).unwrap();
        assert_eq!(g.m(), 9);
        assert!((0..6).all(|v| g.degree(v) == 3));
        assert_eq!(gen_random_regular(6, 3, 1).unwrap(), g);
        assert_eq!(gen_random_regular(5, 3, 1), Err(GenError::InfeasibleDegree { n: 5, d: 3 }));
        assert!(gen_random_regular(4, 4, 1).is_err());
    }

    #[test]
    fn connected_graphs() {
        for seed in 0..20 {
            let g = gen_random_connected(8, 12, seed).unwrap();
            assert_eq!((g.n(), g.m()), (8, 12));
            assert!(g.is_connected());
        }
        assert!(gen_random_connected(5, 3, 0).is_err());
        assert!(gen_random_connected(5, 11, 0).is_err());
    }
}
