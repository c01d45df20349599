//! Immutable directed graphs in dual CSR form.
//!
//! Both in- and out-adjacency are materialized so that `I(v)` and `O(v)` are
//! O(1) slice lookups. Raw node labels from an edge list are remapped to dense
//! ids in ascending label order; the mapping is kept for CLI round trips.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Dense node identifier in `[0, n)`.
pub type NodeId = u32;

/// Options for [`Graph::load_edge_list`].
#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    /// Insert the reverse of every edge (symmetrization for undirected data).
    pub undirected: bool,
    /// Lines starting with this character are skipped.
    pub comment_prefix: char,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            undirected: false,
            comment_prefix: '#',
        }
    }
}

/// Immutable directed graph with sorted dual CSR adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    m: usize,
    in_off: Vec<usize>,
    in_adj: Vec<NodeId>,
    out_off: Vec<usize>,
    out_adj: Vec<NodeId>,
    /// Dense id -> raw label.
    labels: Vec<u64>,
    /// Raw label -> dense id.
    label_index: HashMap<u64, NodeId>,
}

impl Graph {
    /// Builds a graph over nodes `0..n` from dense-id edges.
    ///
    /// Duplicate edges collapse; self-loops are kept. Labels are the identity.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Graph> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "node count {n} exceeds the u32 id space"
            )));
        }
        for &(u, v) in edges {
            for node in [u, v] {
                if node as usize >= n {
                    return Err(Error::NodeOutOfRange {
                        node: node as u64,
                        n,
                    });
                }
            }
        }
        let mut dedup: Vec<(NodeId, NodeId)> = edges.to_vec();
        dedup.sort_unstable();
        dedup.dedup();
        let labels: Vec<u64> = (0..n as u64).collect();
        let label_index = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i as NodeId))
            .collect();
        Ok(Self::assemble(n, dedup, labels, label_index))
    }

    /// Parses a SNAP-style edge list: one `u v` pair per line, arbitrary
    /// whitespace, comment lines skipped, blank lines ignored.
    ///
    /// Raw labels are arbitrary non-negative integers and are remapped to
    /// dense ids in ascending label order.
    pub fn load_edge_list(reader: impl BufRead, opts: &LoadOptions) -> Result<Graph> {
        let mut raw_edges: Vec<(u64, u64)> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with(opts.comment_prefix) {
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let (u, v) = match (fields.next(), fields.next(), fields.next()) {
                (Some(u), Some(v), None) => (u, v),
                _ => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected two node labels, got {trimmed:?}"),
                    })
                }
            };
            let parse = |tok: &str| -> Result<u64> {
                tok.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("invalid node label {tok:?}"),
                })
            };
            let (u, v) = (parse(u)?, parse(v)?);
            raw_edges.push((u, v));
            if opts.undirected {
                raw_edges.push((v, u));
            }
        }
        if raw_edges.is_empty() {
            return Err(Error::EmptyGraph);
        }

        let mut labels: Vec<u64> = raw_edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() > u32::MAX as usize {
            return Err(Error::InvalidParameter(
                "graph exceeds the u32 id space".into(),
            ));
        }
        let label_index: HashMap<u64, NodeId> = labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i as NodeId))
            .collect();

        let mut edges: Vec<(NodeId, NodeId)> = raw_edges
            .iter()
            .map(|&(u, v)| (label_index[&u], label_index[&v]))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::assemble(labels.len(), edges, labels, label_index))
    }

    /// `edges` must be sorted and deduplicated, with endpoints `< n`.
    fn assemble(
        n: usize,
        edges: Vec<(NodeId, NodeId)>,
        labels: Vec<u64>,
        label_index: HashMap<u64, NodeId>,
    ) -> Graph {
        let m = edges.len();
        let mut out_off = vec![0usize; n + 1];
        let mut in_off = vec![0usize; n + 1];
        for &(u, v) in &edges {
            out_off[u as usize + 1] += 1;
            in_off[v as usize + 1] += 1;
        }
        for i in 0..n {
            out_off[i + 1] += out_off[i];
            in_off[i + 1] += in_off[i];
        }
        let mut out_adj = vec![0 as NodeId; m];
        let mut in_adj = vec![0 as NodeId; m];
        let mut out_cursor = out_off.clone();
        let mut in_cursor = in_off.clone();
        // edges are sorted by (u, v), so out lists fill in ascending order;
        // in lists fill in ascending source order because v-buckets are
        // visited with u increasing.
        for &(u, v) in &edges {
            out_adj[out_cursor[u as usize]] = v;
            out_cursor[u as usize] += 1;
            in_adj[in_cursor[v as usize]] = u;
            in_cursor[v as usize] += 1;
        }
        Graph {
            n,
            m,
            in_off,
            in_adj,
            out_off,
            out_adj,
            labels,
            label_index,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    /// In-neighbors `I(v)`, sorted ascending.
    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.in_adj[self.in_off[v as usize]..self.in_off[v as usize + 1]]
    }

    /// Out-neighbors `O(v)`, sorted ascending.
    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.out_adj[self.out_off[v as usize]..self.out_off[v as usize + 1]]
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_off[v as usize + 1] - self.in_off[v as usize]
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_off[v as usize + 1] - self.out_off[v as usize]
    }

    /// Size of the two-hop in-neighborhood:
    /// `eta(v) = |I(v)| + sum over x in I(v) of |I(x)|`.
    pub fn two_hop_in_size(&self, v: NodeId) -> usize {
        self.in_degree(v)
            + self
                .in_neighbors(v)
                .iter()
                .map(|&x| self.in_degree(x))
                .sum::<usize>()
    }

    /// Dense id of a raw label, if present.
    pub fn node_of_label(&self, label: u64) -> Option<NodeId> {
        self.label_index.get(&label).copied()
    }

    /// Raw label of a dense id.
    pub fn label_of(&self, v: NodeId) -> u64 {
        self.labels[v as usize]
    }

    /// All edges in CSR (u, v) order, as dense ids.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.n as NodeId).flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// Writes the edge list back out using raw labels, one `u v` per line.
    pub fn write_edge_list(&self, mut w: impl Write) -> std::io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{} {}", self.label_of(u), self.label_of(v))?;
        }
        Ok(())
    }

    /// 64-bit fingerprint of (n, m, first/last edge samples) used to pair an
    /// index file with the graph it was built from.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write_u64(self.n as u64);
        h.write_u64(self.m as u64);
        let edges: Vec<(NodeId, NodeId)> = self.edges().take(8).collect();
        for (u, v) in edges {
            h.write_u64(((u as u64) << 32) | v as u64);
        }
        let skip = self.m.saturating_sub(8);
        for (u, v) in self.edges().skip(skip) {
            h.write_u64(((u as u64) << 32) | v as u64);
        }
        h.finish()
    }
}

/// FNV-1a, fixed here so fingerprints are stable across releases.
struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Self(0xcbf29ce484222325)
    }

    fn write_u64(&mut self, x: u64) {
        for b in x.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}
