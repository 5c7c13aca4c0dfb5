//! Sequential vs rayon execution for a full sweep and for source tabulation.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use subdiffusion::exec::Execution;
use subdiffusion::harness::{build_problem, run_experiment, Composition, ExperimentConfig};
use subdiffusion::solver::{SchemeKind, TimeGrid};
use subdiffusion::source::tabulate_regularized_with;

fn modes() -> Vec<(&'static str, Execution)> {
    let mut m = vec![("sequential", Execution::Sequential)];
    if cfg!(feature = "parallel") {
        m.push(("parallel", Execution::Parallel));
    }
    m
}

fn sweep(c: &mut Criterion) {
    let mut cfg = ExperimentConfig::example(
        0.7,
        -0.8,
        0.0,
        Composition::Product,
        &[SchemeKind::Bdf2, SchemeKind::Id1Bdf2, SchemeKind::Id2Bdf2],
    );
    cfg.n_list = vec![50, 100, 200];
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_experiment(&cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn tabulation(c: &mut Criterion) {
    // convolution sources need a Gauss-Jacobi sum per step
    let mut cfg = ExperimentConfig::example(
        0.3,
        -0.2,
        1.9,
        Composition::Convolution,
        &[SchemeKind::Id1Bdf2],
    );
    cfg.n_list = vec![400, 800];
    let problem = build_problem(&cfg).unwrap();
    let grid = TimeGrid::new(1.0, 800).unwrap();
    let mut group = c.benchmark_group("tabulate_J1");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| tabulate_regularized_with(&problem.g, 1, &grid, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep, tabulation);
criterion_main!(benches);
