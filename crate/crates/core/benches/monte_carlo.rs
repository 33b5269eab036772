use bpre_core::models::bundled;
use bpre_core::parallel::Execution;
use bpre_core::simulate::{mc_tail, tilted_tail, McConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

const REPLICATES: u64 = 20_000;

fn modes() -> Vec<(&'static str, Execution)> {
    vec![
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel { threads: 0 }),
    ]
}

fn naive_critical(c: &mut Criterion) {
    let env = bundled::critical().env;
    let mut group = c.benchmark_group("naive_critical_n12");
    for (name, exec) in modes() {
        let cfg = McConfig::new(REPLICATES, 1).with_exec(exec);
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| mc_tail(black_box(&env), 12, 1, 16, cfg).unwrap())
        });
    }
    group.finish();
}

fn tilted_heavy_tail(c: &mut Criterion) {
    let env = bundled::heavy_supercritical().env;
    let mut group = c.benchmark_group("tilted_zeta_n20");
    group.sample_size(10);
    for (name, exec) in modes() {
        let cfg = McConfig::new(REPLICATES, 1).with_exec(exec);
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| tilted_tail(black_box(&env), 20, 1, 0.37, 4700, cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, naive_critical, tilted_heavy_tail);
criterion_main!(benches);
