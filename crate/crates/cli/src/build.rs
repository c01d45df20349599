use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use sling::correction::EstimatorMode;
use sling::index::IndexStats;
use sling::mc;
use sling::{build_index, Result, SlingParams};

use crate::common;

#[derive(Clone, Copy, ValueEnum)]
pub enum EstimatorArg {
    Basic,
    Adaptive,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum BaselineArg {
    Sling,
    Mc,
}

#[derive(Args)]
pub struct BuildArgs {
    /// Edge-list file (SNAP style: "u v" per line, '#' comments)
    #[arg(long)]
    pub graph: PathBuf,
    /// Insert the reverse of every edge while loading
    #[arg(long)]
    pub undirected: bool,
    /// Overall additive error bound
    #[arg(long)]
    pub eps: f64,
    /// Overall failure probability
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// SimRank decay factor
    #[arg(long, default_value_t = 0.6)]
    pub c: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Correction-factor sampler
    #[arg(long, value_enum, default_value_t = EstimatorArg::Adaptive)]
    pub estimator: EstimatorArg,
    /// Output index file
    #[arg(long)]
    pub out: PathBuf,
    /// Which index to build
    #[arg(long, value_enum, default_value_t = BaselineArg::Sling)]
    pub baseline: BaselineArg,
}

#[derive(Serialize)]
struct ParamsEcho {
    eps: f64,
    delta: f64,
    c: f64,
    eps_d: f64,
    theta: f64,
    delta_d: f64,
    gamma: f64,
    estimator: &'static str,
}

#[derive(Serialize)]
struct BuildReport {
    index: String,
    kind: &'static str,
    n: usize,
    m: usize,
    seed: u64,
    build_ms: u128,
    params: ParamsEcho,
    stats: IndexStats,
}

#[derive(Serialize)]
struct McParamsEcho {
    eps: f64,
    delta: f64,
    c: f64,
    truncation_step: usize,
    walks_per_node: usize,
}

#[derive(Serialize)]
struct McBuildReport {
    index: String,
    kind: &'static str,
    n: usize,
    m: usize,
    seed: u64,
    build_ms: u128,
    params: McParamsEcho,
    file_bytes: u64,
}

pub fn run(args: BuildArgs) -> Result<()> {
    let g = common::load_graph(&args.graph, args.undirected)?;
    match args.baseline {
        BaselineArg::Sling => {
            let mut params = SlingParams::derive(args.eps, args.delta, args.c, g.node_count())?;
            params.mode = match args.estimator {
                EstimatorArg::Basic => EstimatorMode::Basic,
                EstimatorArg::Adaptive => EstimatorMode::Adaptive,
            };
            let start = std::time::Instant::now();
            let ix = build_index(&g, &params, args.seed, args.threads)?;
            let build_ms = start.elapsed().as_millis();
            ix.save(&args.out)?;
            eprintln!("wrote {} ({} bytes)", args.out.display(), ix.file_bytes());
            common::print_json(&BuildReport {
                index: args.out.display().to_string(),
                kind: "sling",
                n: g.node_count(),
                m: g.edge_count(),
                seed: args.seed,
                build_ms,
                params: ParamsEcho {
                    eps: params.eps,
                    delta: params.delta,
                    c: params.c,
                    eps_d: params.eps_d,
                    theta: params.theta,
                    delta_d: params.delta_d,
                    gamma: params.gamma,
                    estimator: params.mode.as_str(),
                },
                stats: ix.stats(),
            });
        }
        BaselineArg::Mc => {
            let start = std::time::Instant::now();
            let ix = mc::mc_build(&g, args.c, args.eps, args.delta, args.seed, args.threads)?;
            let build_ms = start.elapsed().as_millis();
            ix.save(&args.out)?;
            let file_bytes = ix.to_bytes().len() as u64;
            eprintln!("wrote {} ({} bytes)", args.out.display(), file_bytes);
            common::print_json(&McBuildReport {
                index: args.out.display().to_string(),
                kind: "mc",
                n: g.node_count(),
                m: g.edge_count(),
                seed: args.seed,
                build_ms,
                params: McParamsEcho {
                    eps: ix.eps,
                    delta: ix.delta,
                    c: ix.c,
                    truncation_step: ix.t,
                    walks_per_node: ix.n_w,
                },
                file_bytes,
            });
        }
    }
    Ok(())
}
