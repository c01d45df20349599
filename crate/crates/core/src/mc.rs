//! Monte Carlo baseline: per-node precomputed reverse random walks,
//! first-meeting-time estimation.
//!
//! Unlike the index walks, baseline walks carry no stopping coin; they run
//! until they hit an in-degree-0 node or the truncation step `t`, and the
//! estimator averages `c^tau` over paired walks, with `c^inf = 0` when a
//! pair never meets within the horizon. Truncation makes the estimator
//! underestimate by at most `c^(t+1)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fileio::{self, Cursor, Writer};
use crate::graph::{Graph, NodeId};
use crate::par;
use crate::query::SourceResult;
use crate::walks::RngSeed;

/// Default cap on stored walk slots (`n * n_w * (t+1)`), 1 GiB of u32s.
pub const DEFAULT_MC_SLOT_CAP: usize = 1 << 28;

/// Truncation step: `floor(log_c(eps / 2)) + 1`, the smallest horizon whose
/// truncation bias `c^(t+1)` stays under `eps / 2`.
pub fn mc_truncation_step(c: f64, eps: f64) -> usize {
    ((eps / 2.0).ln() / c.ln()).floor() as usize + 1
}

/// Walks per node: `ceil(14 / (3 eps^2) * (ln(2/delta) + 2 ln n))`, sized so
/// the estimate is within `eps` for all pairs simultaneously with
/// probability `1 - delta`.
pub fn mc_walk_count(n: usize, eps: f64, delta: f64) -> usize {
    (14.0 / (3.0 * eps * eps) * ((2.0 / delta).ln() + 2.0 * (n as f64).ln())).ceil() as usize
}

/// Fixed-stride storage of truncated reverse walks for every node.
#[derive(Debug, Clone, PartialEq)]
pub struct McIndex {
    pub c: f64,
    pub eps: f64,
    pub delta: f64,
    /// Truncation step; stored walks have `t + 1` slots.
    pub t: usize,
    /// Walks per node.
    pub n_w: usize,
    pub seed: u64,
    pub graph_fingerprint: u64,
    n: usize,
    /// `n * n_w * (t+1)` slots; dead tail slots hold the sentinel `n`.
    walks: Vec<NodeId>,
}

pub fn mc_build(
    g: &Graph,
    c: f64,
    eps: f64,
    delta: f64,
    seed: u64,
    workers: usize,
) -> Result<McIndex> {
    mc_build_with_cap(g, c, eps, delta, seed, workers, DEFAULT_MC_SLOT_CAP)
}

pub fn mc_build_with_cap(
    g: &Graph,
    c: f64,
    eps: f64,
    delta: f64,
    seed: u64,
    workers: usize,
    slot_cap: usize,
) -> Result<McIndex> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be in (0,1), got {eps}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be in (0,1), got {delta}"
        )));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "decay factor must be in (0,1), got {c}"
        )));
    }
    let n = g.node_count();
    let t = mc_truncation_step(c, eps);
    let n_w = mc_walk_count(n, eps, delta);
    let stride = t + 1;
    let slots = n
        .checked_mul(n_w)
        .and_then(|x| x.checked_mul(stride))
        .ok_or(Error::CapExceeded {
            what: "walk storage slots",
            needed: usize::MAX,
            cap: slot_cap,
        })?;
    if slots > slot_cap {
        return Err(Error::CapExceeded {
            what: "walk storage slots",
            needed: slots,
            cap: slot_cap,
        });
    }
    let sentinel = n as NodeId;
    let blocks = par::with_pool(workers, || {
        par::map_indexed(n, |v| {
            let mut rng = RngSeed::new(seed, v as u64).rng();
            let mut block = vec![sentinel; n_w * stride];
            for w in 0..n_w {
                let slot = &mut block[w * stride..(w + 1) * stride];
                let mut cur = v as NodeId;
                slot[0] = cur;
                for step in slot.iter_mut().skip(1) {
                    let ins = g.in_neighbors(cur);
                    if ins.is_empty() {
                        break;
                    }
                    cur = ins[rng.random_range(0..ins.len())];
                    *step = cur;
                }
            }
            block
        })
    });
    let mut walks = Vec::with_capacity(slots);
    for block in blocks {
        walks.extend_from_slice(&block);
    }
    Ok(McIndex {
        c,
        eps,
        delta,
        t,
        n_w,
        seed,
        graph_fingerprint: g.fingerprint(),
        n,
        walks,
    })
}

impl McIndex {
    pub fn node_count(&self) -> usize {
        self.n
    }

    fn stride(&self) -> usize {
        self.t + 1
    }

    fn block(&self, v: NodeId) -> &[NodeId] {
        let len = self.n_w * self.stride();
        &self.walks[v as usize * len..(v as usize + 1) * len]
    }

    pub fn verify_graph(&self, g: &Graph) -> Result<()> {
        let fp = g.fingerprint();
        if fp != self.graph_fingerprint {
            return Err(Error::FingerprintMismatch {
                index: self.graph_fingerprint,
                graph: fp,
            });
        }
        Ok(())
    }

    /// Average of `c^tau` over the `n_w` walk pairs of `i` and `j`, where
    /// `tau` is the first step at which the paired walks coincide.
    pub fn pair(&self, i: NodeId, j: NodeId) -> Result<f64> {
        for v in [i, j] {
            if v as usize >= self.n {
                return Err(Error::NodeOutOfRange {
                    node: v as u64,
                    n: self.n,
                });
            }
        }
        let stride = self.stride();
        let sentinel = self.n as NodeId;
        let (bi, bj) = (self.block(i), self.block(j));
        let mut sum = 0.0;
        for w in 0..self.n_w {
            let wi = &bi[w * stride..(w + 1) * stride];
            let wj = &bj[w * stride..(w + 1) * stride];
            for s in 0..stride {
                let (a, b) = (wi[s], wj[s]);
                if a == sentinel || b == sentinel {
                    break;
                }
                if a == b {
                    sum += self.c.powi(s as i32);
                    break;
                }
            }
        }
        Ok(sum / self.n_w as f64)
    }

    /// Pair estimates against every node; zero scores omitted.
    pub fn source(&self, i: NodeId) -> Result<SourceResult> {
        let mut scores = Vec::new();
        for j in 0..self.n as NodeId {
            let s = self.pair(i, j)?;
            if s != 0.0 {
                scores.push((j, s));
            }
        }
        Ok(SourceResult { source: i, scores })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(fileio::MC_MAGIC);
        w.put_u64(self.n as u64);
        w.put_f64(self.c);
        w.put_f64(self.eps);
        w.put_f64(self.delta);
        w.put_u32(self.t as u32);
        w.put_u64(self.n_w as u64);
        w.put_u32(0); // flags, reserved
        w.put_u64(self.seed);
        w.put_u64(self.graph_fingerprint);
        for &x in &self.walks {
            w.put_u32(x);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let payload = fileio::verify_envelope(bytes, fileio::MC_MAGIC)?;
        let mut cur = Cursor::new(payload);
        let n = cur.u64()? as usize;
        let c = cur.f64()?;
        let eps = cur.f64()?;
        let delta = cur.f64()?;
        let t = cur.u32()? as usize;
        let n_w = cur.u64()? as usize;
        let _flags = cur.u32()?;
        let seed = cur.u64()?;
        let graph_fingerprint = cur.u64()?;
        let slots = n
            .checked_mul(n_w)
            .and_then(|x| x.checked_mul(t + 1))
            .ok_or_else(|| Error::Format("walk dimensions overflow".into()))?;
        if cur.remaining() % 4 != 0 || cur.remaining() / 4 != slots {
            return Err(Error::Format(format!(
                "walk payload holds {} bytes, expected {} slots",
                cur.remaining(),
                slots
            )));
        }
        let mut walks = Vec::with_capacity(slots);
        for _ in 0..slots {
            walks.push(cur.u32()?);
        }
        Ok(Self {
            c,
            eps,
            delta,
            t,
            n_w,
            seed,
            graph_fingerprint,
            n,
            walks,
        })
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn truncation_and_walk_count_formulas() {
        assert_eq!(mc_truncation_step(0.6, 0.025), 9);
        // formula evaluation at (eps, delta, n) = (0.025, 0.01, 1000)
        assert_eq!(mc_walk_count(1000, 0.025, 0.01), 142_717);
    }

    #[test]
    fn slot_cap_guards_memory() {
        let g = Graph::from_edges(50, &[(0, 1)]).unwrap();
        let err = mc_build_with_cap(&g, 0.6, 0.025, 0.01, 1, 0, 1000).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn source_node_without_in_edges_stores_sentinel_tails() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let ix = mc_build(&g, 0.6, 0.2, 0.1, 3, 0).unwrap();
        let stride = ix.t + 1;
        let block = ix.block(0);
        for w in 0..ix.n_w {
            let walk = &block[w * stride..(w + 1) * stride];
            assert_eq!(walk[0], 0);
            assert!(walk[1..].iter().all(|&x| x == 2), "sentinel-padded tail");
        }
    }

    #[test]
    fn pair_fixtures() {
        let c = 0.6;
        // shared parent: every walk pair meets at step 1, deterministically
        let g = Graph::from_edges(3, &[(2, 0), (2, 1)]).unwrap();
        let ix = mc_build(&g, c, 0.1, 0.1, 7, 0).unwrap();
        assert_eq!(ix.pair(0, 0).unwrap(), 1.0);
        assert!((ix.pair(0, 1).unwrap() - c).abs() < 1e-12);

        let g = Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        let ix = mc_build(&g, c, 0.1, 0.1, 7, 0).unwrap();
        assert_eq!(ix.pair(0, 1).unwrap(), 0.0);
    }

    #[test]
    fn source_mirrors_pair() {
        let g = Graph::from_edges(3, &[(2, 0), (2, 1)]).unwrap();
        let ix = mc_build(&g, 0.6, 0.1, 0.1, 7, 0).unwrap();
        let res = ix.source(0).unwrap();
        assert_eq!(res.get(0), 1.0);
        assert_eq!(res.get(1), ix.pair(0, 1).unwrap());
        assert_eq!(res.get(2), 0.0);

        // isolated source
        let g = Graph::from_edges(3, &[(1, 2)]).unwrap();
        let ix = mc_build(&g, 0.6, 0.2, 0.1, 7, 0).unwrap();
        assert_eq!(ix.source(0).unwrap().scores, vec![(0, 1.0)]);
    }

    #[test]
    fn deterministic_per_seed_and_worker_independent() {
        let g = crate::synth::gnm_directed(20, 80, 5);
        let a = mc_build(&g, 0.6, 0.15, 0.1, 11, 1).unwrap();
        let b = mc_build(&g, 0.6, 0.15, 0.1, 11, 4).unwrap();
        assert_eq!(a, b);
        let c = mc_build(&g, 0.6, 0.15, 0.1, 12, 0).unwrap();
        assert_ne!(a.walks, c.walks);
    }

    #[test]
    fn k3_estimate_tracks_oracle_within_eps() {
        let g = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]).unwrap();
        let (c, eps) = (0.6, 0.05);
        let truth = oracle::power_method(&g, c, 50).unwrap();
        let ix = mc_build(&g, c, eps, 0.05, 3, 0).unwrap();
        for i in 0..3u32 {
            for j in 0..3u32 {
                let est = ix.pair(i, j).unwrap();
                assert!(
                    (est - truth.get(i, j)).abs() <= eps,
                    "({i},{j}): {est} vs {}",
                    truth.get(i, j)
                );
            }
        }
    }

    #[test]
    fn round_trip_bytes() {
        let g = crate::synth::gnm_directed(12, 40, 2);
        let ix = mc_build(&g, 0.6, 0.2, 0.1, 9, 0).unwrap();
        let bytes = ix.to_bytes();
        let back = McIndex::from_bytes(&bytes).unwrap();
        assert_eq!(ix, back);
        assert!(matches!(
            McIndex::from_bytes(&bytes[..bytes.len() - 5]).unwrap_err(),
            Error::ChecksumMismatch
        ));
    }
}
