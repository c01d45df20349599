//! SimRank queries against a built index.
//!
//! Single-pair: materialize the two effective entry lists (exact two-hop
//! splice plus marked-entry expansion) and merge-join them on (step, target),
//! accumulating `h_i * h_j * d_target`. The join is symmetric in i and j, so
//! pair scores are bitwise symmetric.
//!
//! Single-source: for each step present in the source's effective set, seed
//! the matching targets with `h * d_target` and push forward along out-edges
//! for that many rounds, pruning below `sqrt(c)^step * theta`. Marked-entry
//! expansion is a single-pair refinement and is deliberately not applied
//! here; the source set still gets its exact two-hop splice.

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::hp::{self, HpEntry, HpSet, Scratch};
use crate::index::{DiskIndex, SlingIndex};

/// A single-pair query result. `score` is the raw accumulated value; it can
/// exceed 1 by at most the index error bound. [`PairScore::clamped`] reports
/// the value pinned to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairScore {
    pub i: NodeId,
    pub j: NodeId,
    pub score: f64,
}

impl PairScore {
    pub fn clamped(&self) -> f64 {
        self.score.clamp(0.0, 1.0)
    }
}

/// Sparse single-source result; zero scores are omitted and the source maps
/// to exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceResult {
    pub source: NodeId,
    /// (node, score), ascending by node id.
    pub scores: Vec<(NodeId, f64)>,
}

impl SourceResult {
    pub fn get(&self, v: NodeId) -> f64 {
        match self.scores.binary_search_by_key(&v, |&(n, _)| n) {
            Ok(i) => self.scores[i].1,
            Err(_) => 0.0,
        }
    }

    /// Nodes ranked by (score desc, id asc), source excluded, truncated to k.
    pub fn ranked(&self, k: usize) -> Vec<(NodeId, f64)> {
        let mut out: Vec<(NodeId, f64)> = self
            .scores
            .iter()
            .copied()
            .filter(|&(v, _)| v != self.source)
            .collect();
        out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        out.truncate(k);
        out
    }
}

fn check_node(n: usize, v: NodeId) -> Result<()> {
    if (v as usize) < n {
        Ok(())
    } else {
        Err(Error::NodeOutOfRange { node: v as u64, n })
    }
}

/// Merge-join two (step, target)-sorted entry lists; each shared key
/// contributes `(h_a * h_b) * d_target`, a symmetric expression.
fn merge_join(a: &[HpEntry], b: &[HpEntry], d: &[f64]) -> f64 {
    let (mut x, mut y) = (0usize, 0usize);
    let mut score = 0.0;
    while x < a.len() && y < b.len() {
        match a[x].key().cmp(&b[y].key()) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                score += (a[x].value * b[y].value) * d[a[x].target as usize];
                x += 1;
                y += 1;
            }
        }
    }
    score
}

fn pair_core(c: f64, d: &[f64], g: &Graph, set_i: &HpSet, set_j: &HpSet) -> f64 {
    let a = hp::effective_entries(set_i, g, c, true);
    let b = hp::effective_entries(set_j, g, c, true);
    merge_join(&a, &b, d)
}

/// Approximate `s(i, j)`; exact 1 on the diagonal.
pub fn single_pair(ix: &SlingIndex, g: &Graph, i: NodeId, j: NodeId) -> Result<PairScore> {
    check_node(ix.node_count(), i)?;
    check_node(ix.node_count(), j)?;
    let score = if i == j {
        1.0
    } else {
        pair_core(ix.c, &ix.d, g, &ix.sets[i as usize], &ix.sets[j as usize])
    };
    Ok(PairScore { i, j, score })
}

/// Forward-push evaluation of all scores from `source`.
fn source_core(
    c: f64,
    theta: f64,
    d: &[f64],
    g: &Graph,
    source_set: &HpSet,
    source: NodeId,
) -> SourceResult {
    let n = g.node_count();
    let sqrt_c = c.sqrt();
    // two-hop splice, no marked expansion
    let entries = hp::effective_entries(source_set, g, c, false);
    let mut result = Scratch::new(n);
    let mut next = Scratch::new(n);
    let mut run = 0usize;
    while run < entries.len() {
        let step = entries[run].step;
        let mut rho: Vec<(NodeId, f64)> = Vec::new();
        while run < entries.len() && entries[run].step == step {
            let e = &entries[run];
            rho.push((e.target, e.value * d[e.target as usize]));
            run += 1;
        }
        let prune = sqrt_c.powi(step as i32) * theta;
        for _ in 0..step {
            for &(x, val) in &rho {
                if val > prune {
                    for &y in g.out_neighbors(x) {
                        next.add(y, sqrt_c * val / g.in_degree(y) as f64);
                    }
                }
            }
            rho = next.drain_above(0.0);
            if rho.is_empty() {
                break;
            }
        }
        for &(v, val) in &rho {
            result.add(v, val);
        }
    }
    let mut scores = result.drain_above(0.0);
    match scores.binary_search_by_key(&source, |&(v, _)| v) {
        Ok(i) => scores[i].1 = 1.0,
        Err(i) => scores.insert(i, (source, 1.0)),
    }
    SourceResult { source, scores }
}

/// Approximate `s(source, v)` for every node with a nonzero estimate.
pub fn single_source(ix: &SlingIndex, g: &Graph, source: NodeId) -> Result<SourceResult> {
    check_node(ix.node_count(), source)?;
    Ok(source_core(
        ix.c,
        ix.theta,
        &ix.d,
        g,
        &ix.sets[source as usize],
        source,
    ))
}

/// Reference single-source evaluation: one pair query per node.
pub fn single_source_naive(ix: &SlingIndex, g: &Graph, source: NodeId) -> Result<SourceResult> {
    check_node(ix.node_count(), source)?;
    let mut scores = Vec::new();
    for v in 0..ix.node_count() as NodeId {
        let s = single_pair(ix, g, source, v)?.score;
        if s != 0.0 {
            scores.push((v, s));
        }
    }
    Ok(SourceResult { source, scores })
}

/// The `k` most similar nodes to `source` (source itself excluded).
pub fn top_k(ix: &SlingIndex, g: &Graph, source: NodeId, k: usize) -> Result<Vec<(NodeId, f64)>> {
    Ok(single_source(ix, g, source)?.ranked(k))
}

/// Disk-resident single-pair query: exactly two node-record reads.
pub fn single_pair_disk(ix: &DiskIndex, g: &Graph, i: NodeId, j: NodeId) -> Result<PairScore> {
    check_node(ix.node_count(), i)?;
    check_node(ix.node_count(), j)?;
    let score = if i == j {
        1.0
    } else {
        let set_i = ix.read_node(i)?;
        let set_j = ix.read_node(j)?;
        pair_core(ix.c, ix.d(), g, &set_i, &set_j)
    };
    Ok(PairScore { i, j, score })
}

/// Disk-resident single-source query: one node-record read.
pub fn single_source_disk(ix: &DiskIndex, g: &Graph, source: NodeId) -> Result<SourceResult> {
    check_node(ix.node_count(), source)?;
    let set = ix.read_node(source)?;
    Ok(source_core(ix.c, ix.theta, ix.d(), g, &set, source))
}
