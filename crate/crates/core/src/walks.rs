//! Reverse random-walk engine with reproducible, stream-splittable
//! randomness.
//!
//! A walk continues from its current node with probability `sqrt(c)` and then
//! moves to a uniformly chosen in-neighbor. A node with no in-neighbors halts
//! the walk immediately and consumes no randomness, so degenerate nodes never
//! perturb a stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, NodeId};

/// A (seed, stream) pair that fully determines a random sequence.
///
/// Every node-parallel computation assigns stream id = node id, which makes
/// results independent of worker count and scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Samples one full walk from `start`; index 0 is the start node.
pub fn sample_walk<R: Rng>(g: &Graph, start: NodeId, c: f64, rng: &mut R) -> Vec<NodeId> {
    debug_assert!(c > 0.0 && c < 1.0);
    let sqrt_c = c.sqrt();
    let mut walk = vec![start];
    let mut cur = start;
    loop {
        let ins = g.in_neighbors(cur);
        if ins.is_empty() || !rng.random_bool(sqrt_c) {
            return walk;
        }
        cur = ins[rng.random_range(0..ins.len())];
        walk.push(cur);
    }
}

/// True iff the walks occupy the same node at some common step.
pub fn walks_meet(w1: &[NodeId], w2: &[NodeId]) -> bool {
    w1.iter().zip(w2).any(|(a, b)| a == b)
}

/// Step-synchronous meeting test for a pair of walks from `i` and `j`.
///
/// Equivalent to sampling both walks and calling [`walks_meet`], but
/// terminates as soon as the walks meet or either one halts, and never
/// stores the walks. Draw order per step: continue-coin for the first walk,
/// continue-coin for the second, then both neighbor picks.
pub fn pair_walks_meet<R: Rng>(g: &Graph, c: f64, i: NodeId, j: NodeId, rng: &mut R) -> bool {
    let sqrt_c = c.sqrt();
    let (mut a, mut b) = (i, j);
    loop {
        if a == b {
            return true;
        }
        let ins_a = g.in_neighbors(a);
        if ins_a.is_empty() || !rng.random_bool(sqrt_c) {
            return false;
        }
        let ins_b = g.in_neighbors(b);
        if ins_b.is_empty() || !rng.random_bool(sqrt_c) {
            return false;
        }
        a = ins_a[rng.random_range(0..ins_a.len())];
        b = ins_b[rng.random_range(0..ins_b.len())];
    }
}

/// Monte-Carlo SimRank estimate: fraction of `samples` independent walk
/// pairs from `i` and `j` that meet.
pub fn mc_pair_estimate<R: Rng>(
    g: &Graph,
    c: f64,
    i: NodeId,
    j: NodeId,
    samples: usize,
    rng: &mut R,
) -> f64 {
    assert!(samples >= 1);
    let mut hits = 0usize;
    for _ in 0..samples {
        if pair_walks_meet(g, c, i, j, rng) {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
        RngSeed::new(seed, stream).rng()
    }

    #[test]
    fn source_with_no_in_neighbors_halts_immediately() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let mut r = rng(1, 0);
        assert_eq!(sample_walk(&g, 0, 0.6, &mut r), vec![0]);
    }

    #[test]
    fn chain_walks_have_two_shapes() {
        // a=0 -> b=1, so I(b) = {a} and I(a) is empty
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let mut r = rng(7, 0);
        for _ in 0..200 {
            let w = sample_walk(&g, 1, 0.6, &mut r);
            assert!(w == vec![1] || w == vec![1, 0], "unexpected walk {w:?}");
        }
    }

    #[test]
    fn determinism_per_seed_and_stream() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (1, 0)]).unwrap();
        let walks_a: Vec<_> = {
            let mut r = rng(9, 3);
            (0..50).map(|_| sample_walk(&g, 0, 0.6, &mut r)).collect()
        };
        let walks_b: Vec<_> = {
            let mut r = rng(9, 3);
            (0..50).map(|_| sample_walk(&g, 0, 0.6, &mut r)).collect()
        };
        assert_eq!(walks_a, walks_b);
        let walks_c: Vec<_> = {
            let mut r = rng(9, 4);
            (0..50).map(|_| sample_walk(&g, 0, 0.6, &mut r)).collect()
        };
        assert_ne!(walks_a, walks_c);
    }

    #[test]
    fn expected_walk_length_matches_geometric_mean() {
        // all in-degrees >= 1, so only the coin can stop a walk
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let c = 0.6f64;
        let mut r = rng(1234, 0);
        let total: usize = (0..100_000)
            .map(|_| sample_walk(&g, 0, c, &mut r).len() - 1)
            .sum();
        let mean = total as f64 / 100_000.0;
        let expected = c.sqrt() / (1.0 - c.sqrt());
        assert!(
            (mean - expected).abs() / expected < 0.02,
            "mean {mean} vs expected {expected}"
        );
    }

    #[test]
    fn per_step_survival_rate_is_sqrt_c() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let c = 0.6f64;
        let mut r = rng(5, 0);
        let (mut continued, mut at_risk) = (0u64, 0u64);
        for _ in 0..50_000 {
            let len = sample_walk(&g, 0, c, &mut r).len() as u64;
            continued += len - 1;
            at_risk += len;
        }
        let rate = continued as f64 / at_risk as f64;
        assert!((rate - c.sqrt()).abs() < 0.01, "survival rate {rate}");
    }

    #[test]
    fn meeting_predicate() {
        assert!(walks_meet(&[0, 2], &[0, 3])); // same start
        assert!(walks_meet(&[0, 2], &[1, 2])); // meet at step 1
        assert!(!walks_meet(&[0, 2], &[1, 3]));
        assert!(!walks_meet(&[0], &[1, 0])); // offset visits never align
    }

    #[test]
    fn pair_estimates_on_fixtures() {
        let c = 0.6;
        let mut r = rng(42, 0);

        let g = Graph::from_edges(3, &[(2, 0), (2, 1)]).unwrap();
        assert_eq!(mc_pair_estimate(&g, c, 0, 0, 100, &mut r), 1.0);
        let est = mc_pair_estimate(&g, c, 0, 1, 100_000, &mut r);
        assert!((est - 0.6).abs() < 0.01, "estimate {est}");

        // two-cycle positions alternate out of phase
        let g = Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(mc_pair_estimate(&g, c, 0, 1, 20_000, &mut r), 0.0);
    }

    #[test]
    fn estimator_is_unbiased_across_all_pairs() {
        let g = crate::synth::gnm_directed(12, 50, 99);
        let c = 0.6;
        let truth = crate::oracle::power_method(&g, c, 50).unwrap();
        let samples = 30_000;
        let mut failures = 0;
        for i in 0..12u32 {
            for j in (i + 1)..12u32 {
                let mut r = rng(1000 + i as u64, j as u64);
                let est = mc_pair_estimate(&g, c, i, j, samples, &mut r);
                let s = truth.get(i, j);
                let tol = 4.0 * (s * (1.0 - s) / samples as f64).sqrt() + 1e-6;
                if (est - s).abs() > tol {
                    failures += 1;
                }
            }
        }
        // 66 pairs at 4 sigma: one outlier is already very unlikely
        assert!(failures <= 1, "{failures} of 66 pairs outside tolerance");
    }

    #[test]
    fn paired_test_agrees_with_full_walks() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (3, 2), (2, 4), (4, 0)]).unwrap();
        let c = 0.6;
        // statistical agreement: both estimators converge to the same value
        let mut r1 = rng(77, 0);
        let paired = mc_pair_estimate(&g, c, 1, 4, 60_000, &mut r1);
        let mut r2 = rng(78, 0);
        let mut hits = 0usize;
        for _ in 0..60_000 {
            let w1 = sample_walk(&g, 1, c, &mut r2);
            let w2 = sample_walk(&g, 4, c, &mut r2);
            if walks_meet(&w1, &w2) {
                hits += 1;
            }
        }
        let stored = hits as f64 / 60_000.0;
        assert!((paired - stored).abs() < 0.015, "{paired} vs {stored}");
    }
}
