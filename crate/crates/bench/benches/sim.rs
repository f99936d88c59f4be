use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use caseflow_bench::{bottleneck_pair, mesh};
use caseflow_core::run;

fn bench_run_horizon(c: &mut Criterion) {
    let network = bottleneck_pair();
    let mut group = c.benchmark_group("run_bottleneck");
    for horizon in [100u32, 1000] {
        group.bench_with_input(BenchmarkId::from_parameter(horizon), &horizon, |b, &h| {
            b.iter(|| run(black_box(&network), h, 42).unwrap());
        });
    }
    group.finish();
}

fn bench_run_mesh(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_mesh_100_periods");
    for size in [4usize, 8, 16] {
        let network = mesh(size);
        group.bench_with_input(BenchmarkId::from_parameter(size), &network, |b, network| {
            b.iter(|| run(black_box(network), 100, 7).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, bench_run_horizon, bench_run_mesh);
criterion_main!(benches);
