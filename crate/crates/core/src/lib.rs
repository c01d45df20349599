//! SLING: an index for SimRank similarity on directed graphs.
//!
//! SimRank scores two nodes by the probability that reverse random walks
//! from them meet. The index pre-computes two ingredients per node:
//!
//! * a sampled *correction factor*: the probability that two walks from the
//!   node never meet again after step 0 ([`correction`]);
//! * a deterministic set of *hitting probabilities*: where a walk from the
//!   node is likely to sit at each step, built by reverse local updates and
//!   thresholded at `theta` ([`hp`]).
//!
//! A single-pair query merge-joins two hitting-probability sets in
//! `O(1/eps)`; a single-source query re-derives the relevant co-walkers with
//! a forward push ([`query`]). Exact desk-scale oracles ([`oracle`]) and a
//! truncated-walk Monte Carlo baseline ([`mc`]) back the test suite and the
//! eval CLI.
//!
//! Index construction is data-parallel over nodes (rayon, `parallel` feature,
//! on by default) and bit-for-bit deterministic for a fixed seed regardless
//! of worker count: every node samples from its own counter-derived stream.
//!
//! ```
//! use sling::{build_index, Graph, SlingParams};
//! use sling::query;
//!
//! // two nodes sharing their only in-neighbor score exactly c
//! let g = Graph::from_edges(3, &[(2, 0), (2, 1)]).unwrap();
//! let params = SlingParams::derive(0.025, 0.01, 0.6, g.node_count()).unwrap();
//! let index = build_index(&g, &params, 7, 0).unwrap();
//! let s = query::single_pair(&index, &g, 0, 1).unwrap();
//! assert!((s.score - 0.6).abs() <= 0.025);
//! ```

pub mod correction;
pub mod error;
mod fileio;
pub mod graph;
pub mod hp;
pub mod index;
pub mod mc;
pub mod oracle;
pub mod par;
pub mod query;
pub mod synth;
pub mod walks;

pub use error::{Error, Result};
pub use graph::{Graph, LoadOptions, NodeId};
pub use index::{build_index, SlingIndex, SlingParams};
