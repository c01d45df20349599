use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use rand::{Rng, SeedableRng};

use sling::correction::EstimatorMode;
use sling::oracle::{self, ScoreMatrix};
use sling::query as q;
use sling::{build_index, Graph, NodeId, Result, SlingParams};

use crate::build::EstimatorArg;
use crate::common;

#[derive(Clone, Copy, ValueEnum, PartialEq)]
pub enum MethodArg {
    Sling,
    Mc,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
pub enum QueryModeArg {
    /// Evaluate every pair with a single-pair query
    Pair,
    /// Evaluate via one single-source query per node
    Source,
}

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub undirected: bool,
    #[arg(long, value_enum, default_value_t = MethodArg::Sling)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 0.025)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.6)]
    pub c: f64,
    /// Index rebuilds; errors are reported per run and aggregated
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    /// Power-method iterations for the ground truth
    #[arg(long, default_value_t = 50)]
    pub oracle_iters: usize,
    /// Refuse dense oracle above this node count
    #[arg(long, default_value_t = sling::oracle::DEFAULT_DENSE_CAP)]
    pub oracle_cap: usize,
    /// Top-k precision checkpoints
    #[arg(long, value_delimiter = ',', default_values_t = vec![100usize, 400, 1000])]
    pub topk: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Adaptive)]
    pub estimator: EstimatorArg,
    /// Evaluate only this many uniformly sampled pairs (default: all pairs)
    #[arg(long)]
    pub sample_pairs: Option<usize>,
    #[arg(long, value_enum, default_value_t = QueryModeArg::Pair)]
    pub query_mode: QueryModeArg,
    /// Also write one CSV row per run to this path
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Dump the ground-truth score matrix (.tsv extension switches to tabs)
    #[arg(long)]
    pub oracle_out: Option<PathBuf>,
}

/// Mean absolute error within one ground-truth score band.
#[derive(Serialize, Clone)]
pub struct GroupError {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean_error: f64,
}

#[derive(Serialize, Clone)]
pub struct TopkPrecision {
    pub k: usize,
    pub precision: f64,
}

#[derive(Serialize, Clone)]
pub struct RunReport {
    pub run: usize,
    pub seed: u64,
    pub max_error: f64,
    pub group_errors: Vec<GroupError>,
    pub topk_precision: Vec<TopkPrecision>,
    pub build_ms: u128,
    pub eval_ms: u128,
}

#[derive(Serialize)]
pub struct EvalReport {
    pub graph: String,
    pub method: &'static str,
    pub query_mode: &'static str,
    pub n: usize,
    pub m: usize,
    pub eps: f64,
    pub delta: f64,
    pub c: f64,
    pub runs: usize,
    pub oracle_iters: usize,
    pub oracle_ms: u128,
    pub pairs_evaluated: usize,
    pub seed: u64,
    pub max_error_over_runs: f64,
    pub mean_max_error: f64,
    pub run_reports: Vec<RunReport>,
}

/// Ground-truth score bands: high similarity, mid, and everything below.
const BANDS: [(f64, f64); 3] = [(0.1, 1.0), (0.01, 0.1), (0.0, 0.01)];

fn band_of(truth: f64) -> usize {
    if truth >= 0.1 {
        0
    } else if truth >= 0.01 {
        1
    } else {
        2
    }
}

fn sample_pairs(n: usize, want: Option<usize>, seed: u64) -> Vec<(NodeId, NodeId)> {
    let all = n * (n - 1) / 2;
    match want {
        Some(k) if k < all => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x70AD);
            let mut seen = std::collections::HashSet::with_capacity(k);
            while seen.len() < k {
                let i = rng.random_range(0..n as NodeId);
                let j = rng.random_range(0..n as NodeId);
                if i < j {
                    seen.insert((i, j));
                }
            }
            let mut out: Vec<(NodeId, NodeId)> = seen.into_iter().collect();
            out.sort_unstable();
            out
        }
        _ => {
            let mut out = Vec::with_capacity(all);
            for i in 0..n as NodeId {
                for j in (i + 1)..n as NodeId {
                    out.push((i, j));
                }
            }
            out
        }
    }
}

/// Clamped estimates for every requested pair, as the query path would
/// report them.
fn estimate_pairs(
    args: &EvalArgs,
    g: &Graph,
    pairs: &[(NodeId, NodeId)],
    mode: EstimatorMode,
    seed: u64,
) -> Result<(Vec<f64>, u128, u128)> {
    let start = std::time::Instant::now();
    match args.method {
        MethodArg::Sling => {
            let mut params = SlingParams::derive(args.eps, args.delta, args.c, g.node_count())?;
            params.mode = mode;
            let ix = build_index(g, &params, seed, args.threads)?;
            let build_ms = start.elapsed().as_millis();
            let start = std::time::Instant::now();
            let estimates = match args.query_mode {
                QueryModeArg::Pair => {
                    let mut out = Vec::with_capacity(pairs.len());
                    for &(i, j) in pairs {
                        out.push(q::single_pair(&ix, g, i, j)?.clamped());
                    }
                    out
                }
                QueryModeArg::Source => {
                    let mut per_source: Vec<Option<q::SourceResult>> =
                        (0..g.node_count()).map(|_| None).collect();
                    let mut out = Vec::with_capacity(pairs.len());
                    for &(i, j) in pairs {
                        if per_source[i as usize].is_none() {
                            per_source[i as usize] = Some(q::single_source(&ix, g, i)?);
                        }
                        let s = per_source[i as usize].as_ref().unwrap().get(j);
                        out.push(s.clamp(0.0, 1.0));
                    }
                    out
                }
            };
            Ok((estimates, build_ms, start.elapsed().as_millis()))
        }
        MethodArg::Mc => {
            let ix = sling::mc::mc_build(g, args.c, args.eps, args.delta, seed, args.threads)?;
            let build_ms = start.elapsed().as_millis();
            let start = std::time::Instant::now();
            let mut out = Vec::with_capacity(pairs.len());
            for &(i, j) in pairs {
                out.push(ix.pair(i, j)?.clamp(0.0, 1.0));
            }
            Ok((out, build_ms, start.elapsed().as_millis()))
        }
    }
}

fn precision_at(truth_ranked: &[(usize, f64)], est_ranked: &[(usize, f64)], k: usize) -> f64 {
    let k = k.min(truth_ranked.len());
    if k == 0 {
        return 1.0;
    }
    let top_truth: std::collections::HashSet<usize> =
        truth_ranked[..k].iter().map(|&(p, _)| p).collect();
    let hits = est_ranked[..k]
        .iter()
        .filter(|&&(p, _)| top_truth.contains(&p))
        .count();
    hits as f64 / k as f64
}

fn rank(scores: &[f64]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = scores.iter().copied().enumerate().collect();
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    out
}

pub fn run(args: EvalArgs) -> Result<()> {
    let g = common::load_graph(&args.graph, args.undirected)?;
    let n = g.node_count();

    let start = std::time::Instant::now();
    let truth: ScoreMatrix =
        oracle::power_method_with_cap(&g, args.c, args.oracle_iters, args.oracle_cap)?;
    let oracle_ms = start.elapsed().as_millis();
    eprintln!(
        "oracle: {} iterations in {} ms",
        args.oracle_iters, oracle_ms
    );
    if let Some(path) = &args.oracle_out {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        if path.extension().is_some_and(|e| e == "tsv") {
            truth.write_tsv(&mut w)?;
        } else {
            truth.write_csv(&mut w)?;
        }
        eprintln!("wrote oracle matrix to {}", path.display());
    }

    let pairs = sample_pairs(n, args.sample_pairs, args.seed);
    let truths: Vec<f64> = pairs.iter().map(|&(i, j)| truth.get(i, j)).collect();
    let truth_ranked = rank(&truths);

    let mode = match args.estimator {
        EstimatorArg::Basic => EstimatorMode::Basic,
        EstimatorArg::Adaptive => EstimatorMode::Adaptive,
    };

    let mut run_reports = Vec::with_capacity(args.runs);
    for run in 0..args.runs {
        let seed = common::run_seed(args.seed, run as u64);
        let (estimates, build_ms, eval_ms) = estimate_pairs(&args, &g, &pairs, mode, seed)?;

        let mut max_error = 0.0f64;
        let mut band_sum = [0.0f64; 3];
        let mut band_count = [0usize; 3];
        for (&est, &truth) in estimates.iter().zip(&truths) {
            let err = (est - truth).abs();
            max_error = max_error.max(err);
            let b = band_of(truth);
            band_sum[b] += err;
            band_count[b] += 1;
        }
        let group_errors = BANDS
            .iter()
            .enumerate()
            .map(|(b, &(lo, hi))| GroupError {
                lo,
                hi,
                count: band_count[b],
                mean_error: if band_count[b] == 0 {
                    0.0
                } else {
                    band_sum[b] / band_count[b] as f64
                },
            })
            .collect();

        let est_ranked = rank(&estimates);
        let topk_precision = args
            .topk
            .iter()
            .map(|&k| TopkPrecision {
                k,
                precision: precision_at(&truth_ranked, &est_ranked, k),
            })
            .collect();

        eprintln!("run {run}: max_error={max_error:.6} build={build_ms}ms eval={eval_ms}ms");
        run_reports.push(RunReport {
            run,
            seed,
            max_error,
            group_errors,
            topk_precision,
            build_ms,
            eval_ms,
        });
    }

    if let Some(csv_path) = &args.csv {
        let mut f = std::fs::File::create(csv_path)?;
        writeln!(
            f,
            "run,seed,max_error,mean_error_high,mean_error_mid,mean_error_low,build_ms,eval_ms"
        )?;
        for r in &run_reports {
            writeln!(
                f,
                "{},{},{},{},{},{},{},{}",
                r.run,
                r.seed,
                r.max_error,
                r.group_errors[0].mean_error,
                r.group_errors[1].mean_error,
                r.group_errors[2].mean_error,
                r.build_ms,
                r.eval_ms
            )?;
        }
    }

    let max_error_over_runs = run_reports.iter().map(|r| r.max_error).fold(0.0, f64::max);
    let mean_max_error =
        run_reports.iter().map(|r| r.max_error).sum::<f64>() / run_reports.len().max(1) as f64;
    common::print_json(&EvalReport {
        graph: args.graph.display().to_string(),
        method: match args.method {
            MethodArg::Sling => "sling",
            MethodArg::Mc => "mc",
        },
        query_mode: match args.query_mode {
            QueryModeArg::Pair => "pair",
            QueryModeArg::Source => "source",
        },
        n,
        m: g.edge_count(),
        eps: args.eps,
        delta: args.delta,
        c: args.c,
        runs: args.runs,
        oracle_iters: args.oracle_iters,
        oracle_ms,
        pairs_evaluated: pairs.len(),
        seed: args.seed,
        max_error_over_runs,
        mean_max_error,
        run_reports,
    });
    Ok(())
}
