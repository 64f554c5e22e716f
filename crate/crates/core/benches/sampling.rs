//! Benchmarks comparing the rayon-backed job execution against the
//! always-available sequential path, on the sweep workloads that dominate
//! experiment runtime, plus the message-passing kernels themselves.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cspd_core::bp::{sat_bp_discrete, xorsat_bp_discrete, BpConfig, Rounds};
use cspd_core::exec::{map_jobs_sequential, map_jobs_parallel};
use cspd_core::harness::{run_sweep, ExperimentConfig, Method};
use cspd_core::instance::{gen_random, Assignment, Kind};
use cspd_core::rng::rng_from;

fn sweep_config(workers: usize) -> ExperimentConfig {
    let mut cfg =
        ExperimentConfig::new(Kind::Xorsat, 4, 60, vec![0.3, 0.5], Method::Discrete);
    cfg.radius = Rounds::FixedPoint;
    cfg.formulas = 24;
    cfg.replicates = 1;
    cfg.seed = 9;
    cfg.workers = workers;
    cfg
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("discrete_sweep");
    group.sample_size(10);
    for workers in [1usize, 0] {
        let label = if workers == 1 { "sequential" } else { "parallel" };
        group.bench_with_input(BenchmarkId::from_parameter(label), &workers, |b, &w| {
            let cfg = sweep_config(w);
            b.iter(|| run_sweep(&cfg).unwrap());
        });
    }
    group.finish();
}

fn bench_exec_paths(c: &mut Criterion) {
    // the same CPU-bound job through both scheduling paths
    let job = |i: usize| {
        let mut rng = rng_from(123, &[i as u64]);
        let g = gen_random(Kind::Xorsat, 120, 72, 4, &mut rng).unwrap();
        let out = xorsat_bp_discrete(
            &g,
            &Assignment::unset(120),
            BpConfig::with_rounds(Rounds::FixedPoint),
        )
        .unwrap();
        out.fields.iter().filter(|f| f.is_finite()).count()
    };
    let mut group = c.benchmark_group("exec_paths");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| map_jobs_sequential(64, job)));
    group.bench_function("parallel", |b| b.iter(|| map_jobs_parallel(64, 0, job)));
    group.finish();
}

fn bench_bp_kernel(c: &mut Criterion) {
    let mut rng = rng_from(5, &[]);
    let g = gen_random(Kind::Sat, 300, 2100, 4, &mut rng).unwrap();
    let revealed = Assignment::unset(300);
    c.bench_function("sat_bp_r3_n300_a7", |b| {
        b.iter(|| {
            sat_bp_discrete(&g, &revealed, BpConfig::with_rounds(Rounds::Fixed(3))).unwrap()
        })
    });
}

criterion_group!(benches, bench_sweep, bench_exec_paths, bench_bp_kernel);
criterion_main!(benches);
