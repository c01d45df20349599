//! Seeded synthetic graph generators for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, NodeId};

/// Random directed graph with `n` nodes and up to `m` distinct edges
/// (duplicates collapse, so the realized count can be slightly lower).
pub fn gnm_directed(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(NodeId, NodeId)> = (0..m)
        .map(|_| {
            (
                rng.random_range(0..n as NodeId),
                rng.random_range(0..n as NodeId),
            )
        })
        .collect();
    Graph::from_edges(n, &edges).expect("n > 0")
}

/// Random symmetrized graph: every sampled edge is inserted in both
/// directions.
pub fn gnm_undirected(n: usize, m_undirected: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(2 * m_undirected);
    for _ in 0..m_undirected {
        let u = rng.random_range(0..n as NodeId);
        let v = rng.random_range(0..n as NodeId);
        edges.push((u, v));
        edges.push((v, u));
    }
    Graph::from_edges(n, &edges).expect("n > 0")
}

/// Preferential-attachment digraph: node i attaches `d` out-edges to earlier
/// nodes, favoring nodes that already have high in-degree. Produces the
/// skewed in-degree profile typical of web/social graphs.
pub fn preferential(n: usize, d: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(n * d);
    // endpoint pool with one guaranteed slot per node
    let mut pool: Vec<NodeId> = vec![0];
    for u in 1..n as NodeId {
        for _ in 0..d {
            let v = pool[rng.random_range(0..pool.len())];
            edges.push((u, v));
            pool.push(v);
        }
        pool.push(u);
    }
    Graph::from_edges(n, &edges).expect("n > 1")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(gnm_directed(20, 60, 7), gnm_directed(20, 60, 7));
        assert_ne!(gnm_directed(20, 60, 7), gnm_directed(20, 60, 8));
        assert_eq!(preferential(30, 3, 1), preferential(30, 3, 1));
    }

    #[test]
    fn undirected_is_symmetric() {
        let g = gnm_undirected(15, 40, 3);
        for u in 0..g.node_count() as NodeId {
            for &v in g.out_neighbors(u) {
                assert!(g.out_neighbors(v).contains(&u));
            }
        }
    }
}
