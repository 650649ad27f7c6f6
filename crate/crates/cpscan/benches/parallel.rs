//! Parallel vs. sequential throughput for the two Monte Carlo workhorses:
//! null-distribution simulation and bootstrap interval construction.
//!
//! Both produce bit-identical output in either mode, so this bench is purely
//! about speed. Run with `cargo bench --bench parallel`; add
//! `--no-default-features` to check the sequential fallback build.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use cpscan::{
    bootstrap_ci_mode, generate_null_mode, BootMethod, BootstrapSpec, ExecMode, GeneratorDist,
    NullGenSpec, PValuePolicy, Statistic, TimeSeries,
};

const MODES: [(&str, ExecMode); 2] = [
    ("sequential", ExecMode::Sequential),
    ("parallel", ExecMode::Parallel),
];

fn bench_null_generation(c: &mut Criterion) {
    let mut group = c.benchmark_group("null_generation");
    group.sample_size(10);
    for nsim in [200usize, 1000] {
        let spec = NullGenSpec {
            statistic: Statistic::WmwMinP,
            n: 57,
            b: 6,
            nsim,
            generator_dist: GeneratorDist::StandardNormal,
            policy: PValuePolicy::ReferenceCompatible,
            master_seed: 42,
        };
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, nsim), &spec, |bench, spec| {
                bench.iter(|| generate_null_mode(black_box(spec), mode).unwrap());
            });
        }
    }
    group.finish();
}

fn bench_bootstrap(c: &mut Criterion) {
    let mut group = c.benchmark_group("bootstrap_ci");
    group.sample_size(10);
    // A noisy step: segments are non-trivial to resample.
    let values: Vec<f64> = (0..57)
        .map(|i| ((i * 193) % 31) as f64 / 31.0 + if i >= 20 { 2.0 } else { 0.0 })
        .collect();
    let x = TimeSeries::new(values).unwrap();
    for nboot in [500usize, 2000] {
        let spec = BootstrapSpec {
            nboot,
            ..BootstrapSpec::new(BootMethod::Boot2, 7)
        };
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, nboot), &spec, |bench, spec| {
                bench.iter(|| bootstrap_ci_mode(black_box(&x), spec, mode).unwrap());
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_null_generation, bench_bootstrap);
criterion_main!(benches);
