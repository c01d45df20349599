use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use sling::{Error, Graph, LoadOptions, NodeId, Result};

pub fn load_graph(path: &Path, undirected: bool) -> Result<Graph> {
    let start = std::time::Instant::now();
    let file = File::open(path)?;
    let g = Graph::load_edge_list(
        BufReader::new(file),
        &LoadOptions {
            undirected,
            ..Default::default()
        },
    )?;
    eprintln!(
        "loaded {}: n={} m={} ({} ms)",
        path.display(),
        g.node_count(),
        g.edge_count(),
        start.elapsed().as_millis()
    );
    Ok(g)
}

/// Maps a raw input label to its dense id.
pub fn resolve_label(g: &Graph, label: u64) -> Result<NodeId> {
    g.node_of_label(label).ok_or(Error::NodeOutOfRange {
        node: label,
        n: g.node_count(),
    })
}

/// Per-run seed derivation (golden-ratio stride keeps runs well separated).
pub fn run_seed(base: u64, run: u64) -> u64 {
    base.wrapping_add(run.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn print_json<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serialization")
    );
}
