//! Index-construction benchmarks.
//!
//! The `threads-1` / `threads-all` pair measures the rayon speedup inside one
//! binary; rebuilding with `--no-default-features` benches the sequential
//! fallback code path itself (both labels then time the same plain loops).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use sling::correction::{estimate_all_d, EstimatorMode};
use sling::hp::build_all_hp_sets;
use sling::index::{build_index, SlingParams};
use sling::synth;

fn bench_build_index(c: &mut Criterion) {
    let g = synth::gnm_directed(2000, 10_000, 7);
    let params = SlingParams::derive(0.05, 0.01, 0.6, g.node_count()).unwrap();
    let mut group = c.benchmark_group("build_index");
    group.sample_size(10);
    for (label, workers) in [("threads-1", 1usize), ("threads-all", 0)] {
        group.bench_with_input(BenchmarkId::from_parameter(label), &workers, |b, &w| {
            b.iter(|| black_box(build_index(&g, &params, 7, w).unwrap()));
        });
    }
    group.finish();
}

fn bench_hp_sets(c: &mut Criterion) {
    let g = synth::gnm_directed(2000, 10_000, 7);
    let mut group = c.benchmark_group("hp_sets");
    group.sample_size(10);
    for (label, workers) in [("threads-1", 1usize), ("threads-all", 0)] {
        group.bench_with_input(BenchmarkId::from_parameter(label), &workers, |b, &w| {
            b.iter(|| black_box(build_all_hp_sets(&g, 0.6, 0.002, w).unwrap()));
        });
    }
    group.finish();
}

fn bench_correction_estimators(c: &mut Criterion) {
    let g = synth::gnm_directed(2000, 10_000, 7);
    let (eps_d, delta_d) = (0.02, 1e-5);
    let mut group = c.benchmark_group("correction_estimators");
    group.sample_size(10);
    for (label, mode) in [
        ("basic", EstimatorMode::Basic),
        ("adaptive", EstimatorMode::Adaptive),
    ] {
        group.bench_function(label, |b| {
            b.iter(|| black_box(estimate_all_d(&g, 0.6, eps_d, delta_d, mode, 7, 0)));
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_build_index,
    bench_hp_sets,
    bench_correction_estimators
);
criterion_main!(benches);
