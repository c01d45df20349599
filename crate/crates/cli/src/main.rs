//! Command-line surface: build indexes, run queries, reproduce the accuracy
//! experiments against the exact oracle, and benchmark query latency.
//!
//! Machine-readable output (JSON, or CSV for bench rows) goes to stdout;
//! human progress logs go to stderr. Exit codes: 0 ok, 1 usage error,
//! 2 data error, 3 resource guard refusal.

use clap::{Parser, Subcommand};

mod bench;
mod build;
mod common;
mod eval;
mod query;

#[derive(Parser)]
#[command(
    name = "sling",
    version,
    about = "SimRank index: build, query, eval, bench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index file from an edge list
    Build(build::BuildArgs),
    /// Query a built index
    #[command(subcommand)]
    Query(query::QueryCmd),
    /// Measure accuracy against the exact oracle
    Eval(eval::EvalArgs),
    /// Time queries against a built index
    Bench(bench::BenchArgs),
}

fn exit_code(e: &sling::Error) -> i32 {
    use sling::Error;
    match e {
        Error::InvalidParameter(_) => 1,
        Error::CapExceeded { .. } => 3,
        _ => 2,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let result = match cli.command {
        Command::Build(args) => build::run(args),
        Command::Query(cmd) => query::run(cmd),
        Command::Eval(args) => eval::run(args),
        Command::Bench(args) => bench::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
