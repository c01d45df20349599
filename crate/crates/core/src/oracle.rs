//! Exact reference computations used by tests and the eval CLI: power-method
//! SimRank, exact step-wise hitting probabilities, exact correction factors,
//! and direct evaluation of the last-meeting decomposition.
//!
//! Everything here is desk-scale by design: dense `n x n` state guarded by an
//! explicit cap, double precision throughout, deterministic sequential
//! accumulation within each row.

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::par;

/// Default refusal threshold for dense `n x n` state.
pub const DEFAULT_DENSE_CAP: usize = 20_000;

/// Dense symmetric matrix of SimRank scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    n: usize,
    scores: Vec<f64>,
}

impl ScoreMatrix {
    fn identity(n: usize) -> Self {
        let mut scores = vec![0.0; n * n];
        for i in 0..n {
            scores[i * n + i] = 1.0;
        }
        Self { n, scores }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: NodeId, j: NodeId) -> f64 {
        self.scores[i as usize * self.n + j as usize]
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.scores[i * self.n..(i + 1) * self.n]
    }

    /// Writes the matrix with the given separator, one row per line.
    pub fn write_delimited(&self, mut w: impl std::io::Write, sep: char) -> std::io::Result<()> {
        for i in 0..self.n {
            let mut first = true;
            for v in self.row(i) {
                if !first {
                    write!(w, "{sep}")?;
                }
                write!(w, "{v}")?;
                first = false;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn write_csv(&self, w: impl std::io::Write) -> std::io::Result<()> {
        self.write_delimited(w, ',')
    }

    pub fn write_tsv(&self, w: impl std::io::Write) -> std::io::Result<()> {
        self.write_delimited(w, '\t')
    }
}

/// Smallest iteration count `t` with `t >= log_c(eps * (1 - c)) - 1`, clamped
/// at zero. After `t` iterations every score is within `eps` of the fixpoint.
pub fn power_iterations_needed(c: f64, eps: f64) -> usize {
    assert!(c > 0.0 && c < 1.0, "decay factor must be in (0,1)");
    assert!(eps > 0.0 && eps < 1.0, "error bound must be in (0,1)");
    let bound = (eps * (1.0 - c)).ln() / c.ln() - 1.0;
    bound.ceil().max(0.0) as usize
}

/// All-pairs SimRank by `t` rounds of the fixpoint iteration, starting from
/// the identity. Uses [`DEFAULT_DENSE_CAP`].
pub fn power_method(g: &Graph, c: f64, t: usize) -> Result<ScoreMatrix> {
    power_method_with_cap(g, c, t, DEFAULT_DENSE_CAP)
}

pub fn power_method_with_cap(g: &Graph, c: f64, t: usize, cap: usize) -> Result<ScoreMatrix> {
    let n = g.node_count();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "dense all-pairs score matrix",
            needed: n,
            cap,
        });
    }
    let mut s = ScoreMatrix::identity(n);
    let mut half = vec![0.0f64; n * n];
    for _ in 0..t {
        // half(k, j) = mean of s(k, l) over l in I(j); rows independent
        let rows: Vec<Vec<f64>> = par::map_indexed(n, |k| {
            let src = s.row(k);
            let mut row = vec![0.0f64; n];
            for (j, slot) in row.iter_mut().enumerate() {
                let ins = g.in_neighbors(j as NodeId);
                if !ins.is_empty() {
                    let mut acc = 0.0;
                    for &l in ins {
                        acc += src[l as usize];
                    }
                    *slot = acc / ins.len() as f64;
                }
            }
            row
        });
        for (k, row) in rows.into_iter().enumerate() {
            half[k * n..(k + 1) * n].copy_from_slice(&row);
        }
        // s'(i, j) = c * mean of half(k, j) over k in I(i); diagonal pinned to 1
        let next: Vec<Vec<f64>> = par::map_indexed(n, |i| {
            let mut row = vec![0.0f64; n];
            let ins = g.in_neighbors(i as NodeId);
            if !ins.is_empty() {
                let scale = c / ins.len() as f64;
                for &k in ins {
                    let hrow = &half[k as usize * n..(k as usize + 1) * n];
                    for (slot, &h) in row.iter_mut().zip(hrow) {
                        *slot += h;
                    }
                }
                for slot in row.iter_mut() {
                    *slot *= scale;
                }
            }
            row[i] = 1.0;
            row
        });
        for (i, row) in next.into_iter().enumerate() {
            s.scores[i * n..(i + 1) * n].copy_from_slice(&row);
        }
    }
    Ok(s)
}

/// Exact hitting probabilities `h^(l)(source, target)` for all `l <= max_step`,
/// stored sparsely per source and step.
#[derive(Debug, Clone)]
pub struct ExactHpTable {
    c: f64,
    max_step: usize,
    /// `per_source[v][l]` = sorted (target, probability) pairs.
    per_source: Vec<Vec<Vec<(NodeId, f64)>>>,
}

impl ExactHpTable {
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn max_step(&self) -> usize {
        self.max_step
    }

    /// `h^(step)(source, target)`, zero when absent.
    pub fn get(&self, source: NodeId, step: usize, target: NodeId) -> f64 {
        let entries = &self.per_source[source as usize][step];
        match entries.binary_search_by_key(&target, |&(t, _)| t) {
            Ok(i) => entries[i].1,
            Err(_) => 0.0,
        }
    }

    pub fn step_entries(&self, source: NodeId, step: usize) -> &[(NodeId, f64)] {
        &self.per_source[source as usize][step]
    }
}

/// Exact step-wise walk-position distributions, no pruning threshold.
pub fn exact_hitting_probabilities(g: &Graph, c: f64, max_step: usize) -> Result<ExactHpTable> {
    exact_hitting_probabilities_with_cap(g, c, max_step, DEFAULT_DENSE_CAP)
}

pub fn exact_hitting_probabilities_with_cap(
    g: &Graph,
    c: f64,
    max_step: usize,
    cap: usize,
) -> Result<ExactHpTable> {
    let n = g.node_count();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "exact hitting-probability table",
            needed: n,
            cap,
        });
    }
    let sqrt_c = c.sqrt();
    let per_source: Vec<Vec<Vec<(NodeId, f64)>>> = par::map_with_scratch(
        n,
        || vec![0.0f64; n],
        |scratch, a| {
            let mut steps: Vec<Vec<(NodeId, f64)>> = Vec::with_capacity(max_step + 1);
            let mut cur = vec![(a as NodeId, 1.0f64)];
            steps.push(cur.clone());
            for _ in 0..max_step {
                let mut touched: Vec<NodeId> = Vec::new();
                for &(x, p) in &cur {
                    let ins = g.in_neighbors(x);
                    if ins.is_empty() {
                        continue;
                    }
                    let w = sqrt_c * p / ins.len() as f64;
                    for &b in ins {
                        if scratch[b as usize] == 0.0 {
                            touched.push(b);
                        }
                        scratch[b as usize] += w;
                    }
                }
                touched.sort_unstable();
                cur = touched
                    .iter()
                    .map(|&b| {
                        let p = scratch[b as usize];
                        scratch[b as usize] = 0.0;
                        (b, p)
                    })
                    .collect();
                steps.push(cur.clone());
            }
            steps
        },
    );
    Ok(ExactHpTable {
        c,
        max_step,
        per_source,
    })
}

/// Exact correction factors from an all-pairs score matrix:
/// `d_k = 1 - c/|I(k)| - c/|I(k)|^2 * sum of s(i, j) over distinct i, j in I(k)`,
/// with `d_k = 1` for in-degree-0 nodes.
pub fn exact_correction(g: &Graph, c: f64, s: &ScoreMatrix) -> Vec<f64> {
    (0..g.node_count() as NodeId)
        .map(|k| {
            let ins = g.in_neighbors(k);
            if ins.is_empty() {
                return 1.0;
            }
            let deg = ins.len() as f64;
            let mut cross = 0.0;
            for &i in ins {
                for &j in ins {
                    if i != j {
                        cross += s.get(i, j);
                    }
                }
            }
            1.0 - c / deg - c / (deg * deg) * cross
        })
        .collect()
}

/// Truncated last-meeting decomposition
/// `sum over l, k of h^(l)(i, k) * d_k * h^(l)(j, k)` together with the
/// geometric bound `c^(L+1) / (1 - c)` on the discarded tail.
pub fn eval_decomposition(table: &ExactHpTable, d: &[f64], i: NodeId, j: NodeId) -> (f64, f64) {
    let mut score = 0.0;
    for step in 0..=table.max_step() {
        let a = table.step_entries(i, step);
        let b = table.step_entries(j, step);
        let (mut x, mut y) = (0, 0);
        while x < a.len() && y < b.len() {
            match a[x].0.cmp(&b[y].0) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    score += (a[x].1 * b[y].1) * d[a[x].0 as usize];
                    x += 1;
                    y += 1;
                }
            }
        }
    }
    let remainder = table.c().powi(table.max_step() as i32 + 1) / (1.0 - table.c());
    (score, remainder)
}
