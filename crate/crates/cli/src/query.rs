use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::Serialize;

use sling::index::{load_index_file, DiskIndex, IndexFile};
use sling::query as q;
use sling::{NodeId, Result};

use crate::common;

#[derive(Subcommand)]
pub enum QueryCmd {
    /// Score one node pair
    Pair(PairArgs),
    /// Score one node against every node
    Source(SourceArgs),
}

#[derive(Args)]
pub struct PairArgs {
    /// Index file
    #[arg(short = 'i', long = "index")]
    pub index: PathBuf,
    /// Edge-list file the index was built from
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub undirected: bool,
    /// First node (raw label)
    pub u: u64,
    /// Second node (raw label)
    pub v: u64,
    /// Report the raw accumulated score instead of clamping to [0, 1]
    #[arg(long)]
    pub raw: bool,
    /// Serve the query from disk with positioned reads
    #[arg(long)]
    pub from_disk: bool,
}

#[derive(Args)]
pub struct SourceArgs {
    #[arg(short = 'i', long = "index")]
    pub index: PathBuf,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub undirected: bool,
    /// Source node (raw label)
    pub u: u64,
    /// Keep only the K best-scored nodes, ranked descending
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(long)]
    pub raw: bool,
    #[arg(long)]
    pub from_disk: bool,
}

#[derive(Serialize)]
struct PairOut {
    i: u64,
    j: u64,
    score: f64,
}

#[derive(Serialize)]
struct ScoreOut {
    node: u64,
    score: f64,
}

#[derive(Serialize)]
struct SourceOut {
    source: u64,
    scores: Vec<ScoreOut>,
}

fn report(score: f64, raw: bool) -> f64 {
    if raw {
        score
    } else {
        score.clamp(0.0, 1.0)
    }
}

pub fn run(cmd: QueryCmd) -> Result<()> {
    match cmd {
        QueryCmd::Pair(args) => pair(args),
        QueryCmd::Source(args) => source(args),
    }
}

fn pair(args: PairArgs) -> Result<()> {
    let g = common::load_graph(&args.graph, args.undirected)?;
    let i = common::resolve_label(&g, args.u)?;
    let j = common::resolve_label(&g, args.v)?;
    let score = if args.from_disk {
        let disk = DiskIndex::open(&args.index)?;
        disk.verify_graph(&g)?;
        q::single_pair_disk(&disk, &g, i, j)?.score
    } else {
        match load_index_file(&args.index)? {
            IndexFile::Sling(ix) => {
                ix.verify_graph(&g)?;
                q::single_pair(&ix, &g, i, j)?.score
            }
            IndexFile::Mc(ix) => {
                ix.verify_graph(&g)?;
                ix.pair(i, j)?
            }
        }
    };
    common::print_json(&PairOut {
        i: args.u,
        j: args.v,
        score: report(score, args.raw),
    });
    Ok(())
}

fn source(args: SourceArgs) -> Result<()> {
    let g = common::load_graph(&args.graph, args.undirected)?;
    let u = common::resolve_label(&g, args.u)?;
    let result = if args.from_disk {
        let disk = DiskIndex::open(&args.index)?;
        disk.verify_graph(&g)?;
        q::single_source_disk(&disk, &g, u)?
    } else {
        match load_index_file(&args.index)? {
            IndexFile::Sling(ix) => {
                ix.verify_graph(&g)?;
                q::single_source(&ix, &g, u)?
            }
            IndexFile::Mc(ix) => {
                ix.verify_graph(&g)?;
                ix.source(u)?
            }
        }
    };
    let picked: Vec<(NodeId, f64)> = match args.top {
        Some(k) => result.ranked(k),
        None => result.scores.clone(),
    };
    common::print_json(&SourceOut {
        source: args.u,
        scores: picked
            .into_iter()
            .map(|(v, s)| ScoreOut {
                node: g.label_of(v),
                score: report(s, args.raw),
            })
            .collect(),
    });
    Ok(())
}
