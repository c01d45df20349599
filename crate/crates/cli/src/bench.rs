use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sling::index::{load_index_file, IndexFile};
use sling::query as q;
use sling::{Error, Graph, NodeId, Result};

use crate::common;

#[derive(Clone, Copy, ValueEnum, PartialEq)]
pub enum BenchMode {
    Pair,
    Source,
    /// Single-source via one pair query per node
    SourceNaive,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
pub enum SamplingArg {
    /// Query nodes drawn uniformly
    Uniform,
    /// Query nodes drawn proportionally to degree + 1
    Degree,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(short = 'i', long = "index")]
    pub index: PathBuf,
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub undirected: bool,
    /// Timed queries (one CSV row each)
    #[arg(long, default_value_t = 1000)]
    pub queries: usize,
    #[arg(long, value_enum, default_value_t = BenchMode::Pair)]
    pub mode: BenchMode,
    /// Untimed queries run first
    #[arg(long, default_value_t = 10)]
    pub warmup: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SamplingArg::Uniform)]
    pub sampling: SamplingArg,
}

struct NodeSampler {
    cumulative: Option<Vec<u64>>,
    n: usize,
}

impl NodeSampler {
    fn new(g: &Graph, sampling: SamplingArg) -> Self {
        let n = g.node_count();
        let cumulative = match sampling {
            SamplingArg::Uniform => None,
            SamplingArg::Degree => {
                let mut acc = 0u64;
                Some(
                    (0..n as NodeId)
                        .map(|v| {
                            acc += (g.in_degree(v) + g.out_degree(v) + 1) as u64;
                            acc
                        })
                        .collect(),
                )
            }
        };
        Self { cumulative, n }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> NodeId {
        match &self.cumulative {
            None => rng.random_range(0..self.n as NodeId),
            Some(cum) => {
                let total = *cum.last().unwrap();
                let x = rng.random_range(0..total);
                cum.partition_point(|&c| c <= x) as NodeId
            }
        }
    }
}

pub fn run(args: BenchArgs) -> Result<()> {
    let g = common::load_graph(&args.graph, args.undirected)?;
    let index = load_index_file(&args.index)?;
    match &index {
        IndexFile::Sling(ix) => ix.verify_graph(&g)?,
        IndexFile::Mc(ix) => {
            ix.verify_graph(&g)?;
            if args.mode == BenchMode::SourceNaive {
                return Err(Error::InvalidParameter(
                    "source-naive mode only applies to a sling index".into(),
                ));
            }
        }
    }
    let sampler = NodeSampler::new(&g, args.sampling);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let workload: Vec<(NodeId, NodeId)> = (0..args.warmup + args.queries)
        .map(|_| (sampler.draw(&mut rng), sampler.draw(&mut rng)))
        .collect();

    let mode_name = match args.mode {
        BenchMode::Pair => "pair",
        BenchMode::Source => "source",
        BenchMode::SourceNaive => "source-naive",
    };
    let mut timings = Vec::with_capacity(args.queries);
    println!("query,mode,u,v,micros");
    for (idx, &(u, v)) in workload.iter().enumerate() {
        let start = std::time::Instant::now();
        match (&index, args.mode) {
            (IndexFile::Sling(ix), BenchMode::Pair) => {
                std::hint::black_box(q::single_pair(ix, &g, u, v)?);
            }
            (IndexFile::Sling(ix), BenchMode::Source) => {
                std::hint::black_box(q::single_source(ix, &g, u)?);
            }
            (IndexFile::Sling(ix), BenchMode::SourceNaive) => {
                std::hint::black_box(q::single_source_naive(ix, &g, u)?);
            }
            (IndexFile::Mc(ix), BenchMode::Pair) => {
                std::hint::black_box(ix.pair(u, v)?);
            }
            (IndexFile::Mc(ix), _) => {
                std::hint::black_box(ix.source(u)?);
            }
        }
        let micros = start.elapsed().as_nanos() as f64 / 1000.0;
        if idx >= args.warmup {
            let qid = idx - args.warmup;
            println!(
                "{qid},{mode_name},{},{},{micros:.3}",
                g.label_of(u),
                g.label_of(v)
            );
            timings.push(micros);
        }
    }
    timings.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if !timings.is_empty() {
        let mean = timings.iter().sum::<f64>() / timings.len() as f64;
        let p50 = timings[timings.len() / 2];
        let p99 = timings[(timings.len() * 99 / 100).min(timings.len() - 1)];
        let max = timings[timings.len() - 1];
        eprintln!(
            "{} {mode_name} queries: mean={mean:.1}us p50={p50:.1}us p99={p99:.1}us max={max:.1}us",
            timings.len()
        );
    }
    Ok(())
}
