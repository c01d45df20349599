//! Correction-factor estimation.
//!
//! The correction factor `d_k` is the probability that two independent
//! reverse walks from `v_k` never meet after step 0. It satisfies
//!
//! ```text
//! d_k = 1 - c/|I(k)| - c * mu,
//! mu  = 1/|I(k)|^2 * sum of s(i, j) over distinct i, j in I(k)
//! ```
//!
//! so estimating `d_k` reduces to estimating the Bernoulli mean `mu` with
//! walk pairs. Two samplers are provided: a fixed-budget one, and an adaptive
//! one that first spends a small pilot budget and only tops up when the pilot
//! suggests `mu` is large. In-degree 0 and 1 are analytic and consume no
//! randomness at all.

use rand::Rng;

use crate::graph::{Graph, NodeId};
use crate::par;
use crate::walks::{pair_walks_meet, RngSeed};

/// Which sampler drives [`estimate_all_d`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorMode {
    Basic,
    Adaptive,
}

impl EstimatorMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Basic => "basic",
            Self::Adaptive => "adaptive",
        }
    }
}

/// A sampled correction factor plus the number of walk pairs it consumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DkEstimate {
    pub value: f64,
    pub pairs: u64,
}

/// Fixed sample budget of the basic sampler.
pub fn basic_sample_count(c: f64, eps_d: f64, delta_d: f64) -> u64 {
    ((2.0 * c * c + c * eps_d) / (eps_d * eps_d) * (2.0 / delta_d).ln()).ceil() as u64
}

/// Pilot budget of the adaptive sampler.
pub fn adaptive_pilot_count(c: f64, eps_d: f64, delta_d: f64) -> u64 {
    (14.0 * c / (3.0 * eps_d) * (4.0 / delta_d).ln()).ceil() as u64
}

fn clamp_d(c: f64, raw: f64) -> f64 {
    raw.clamp(1.0 - c, 1.0)
}

/// One sampling trial: draw two in-neighbors of `k` uniformly (with
/// replacement); distinct pairs run a synchronized walk pair and report
/// whether it met. Coinciding draws count as a trial that contributes 0.
fn trial<R: Rng>(g: &Graph, c: f64, ins: &[NodeId], rng: &mut R) -> bool {
    let i = ins[rng.random_range(0..ins.len())];
    let j = ins[rng.random_range(0..ins.len())];
    i != j && pair_walks_meet(g, c, i, j, rng)
}

/// Fixed-budget sampler. Requires `|I(k)| >= 2`; the degenerate in-degrees
/// are handled analytically by [`estimate_all_d`].
pub fn estimate_d_basic<R: Rng>(
    g: &Graph,
    k: NodeId,
    c: f64,
    eps_d: f64,
    delta_d: f64,
    rng: &mut R,
) -> DkEstimate {
    let ins = g.in_neighbors(k);
    debug_assert!(ins.len() >= 2);
    let n_r = basic_sample_count(c, eps_d, delta_d);
    let mut cnt = 0u64;
    for _ in 0..n_r {
        if trial(g, c, ins, rng) {
            cnt += 1;
        }
    }
    let raw = 1.0 - c / ins.len() as f64 - c * cnt as f64 / n_r as f64;
    DkEstimate {
        value: clamp_d(c, raw),
        pairs: n_r,
    }
}

/// Two-phase adaptive sampler.
///
/// Runs a pilot of `ceil(14c/(3 eps_d) * ln(4/delta_d))` trials. If the pilot
/// mean is at most `eps_d` it returns immediately; otherwise it derives the
/// upper confidence bound `mu* = mu_hat + sqrt(mu_hat * eps_d)`, tops the
/// trial count up to `ceil((2 c^2 mu* + 2/3 c eps_d)/eps_d^2 * ln(4/delta_d))`
/// (pilot trials are reused), and re-estimates from the full count.
pub fn estimate_d_adaptive<R: Rng>(
    g: &Graph,
    k: NodeId,
    c: f64,
    eps_d: f64,
    delta_d: f64,
    rng: &mut R,
) -> DkEstimate {
    let ins = g.in_neighbors(k);
    debug_assert!(ins.len() >= 2);
    let deg = ins.len() as f64;
    let log_term = (4.0 / delta_d).ln();
    let n_r = adaptive_pilot_count(c, eps_d, delta_d);
    let mut cnt = 0u64;
    for _ in 0..n_r {
        if trial(g, c, ins, rng) {
            cnt += 1;
        }
    }
    let mu_hat = cnt as f64 / n_r as f64;
    if mu_hat <= eps_d {
        return DkEstimate {
            value: clamp_d(c, 1.0 - c / deg - c * mu_hat),
            pairs: n_r,
        };
    }
    let mu_ub = mu_hat + (mu_hat * eps_d).sqrt();
    let n_r_full =
        ((2.0 * c * c * mu_ub + 2.0 / 3.0 * c * eps_d) / (eps_d * eps_d) * log_term).ceil() as u64;
    // the confidence bound needs at least n_r_full trials; keeping any pilot
    // surplus and dividing by the true count stays unbiased
    let total = n_r_full.max(n_r);
    for _ in 0..total - n_r {
        if trial(g, c, ins, rng) {
            cnt += 1;
        }
    }
    let mu = cnt as f64 / total as f64;
    DkEstimate {
        value: clamp_d(c, 1.0 - c / deg - c * mu),
        pairs: total,
    }
}

/// Approximate correction factors for every node.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionVector {
    pub d: Vec<f64>,
    pub eps_d: f64,
    pub delta_d: f64,
    pub seed: u64,
}

/// Estimates `d` for all nodes in parallel.
///
/// Node `k` draws from stream id `k` of `seed`, so the result is a function
/// of `(seed, mode)` alone, independent of `workers`. In-degree-0 nodes get
/// exactly 1, in-degree-1 nodes exactly `1 - c`.
pub fn estimate_all_d(
    g: &Graph,
    c: f64,
    eps_d: f64,
    delta_d: f64,
    mode: EstimatorMode,
    seed: u64,
    workers: usize,
) -> CorrectionVector {
    let n = g.node_count();
    let d = par::with_pool(workers, || {
        par::map_indexed(n, |k| {
            let k = k as NodeId;
            match g.in_degree(k) {
                0 => 1.0,
                1 => 1.0 - c,
                _ => {
                    let mut rng = RngSeed::new(seed, k as u64).rng();
                    match mode {
                        EstimatorMode::Basic => {
                            estimate_d_basic(g, k, c, eps_d, delta_d, &mut rng).value
                        }
                        EstimatorMode::Adaptive => {
                            estimate_d_adaptive(g, k, c, eps_d, delta_d, &mut rng).value
                        }
                    }
                }
            }
        })
    });
    CorrectionVector {
        d,
        eps_d,
        delta_d,
        seed,
    }
}
