use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stpcm_core::construction::{
    awgn_capacity_qam, bec_bhattacharyya, build_construction, equivalent_awgn_sigma, ga_evolve,
};

fn reliability_recursions(c: &mut Criterion) {
    let mut group = c.benchmark_group("reliability");
    for n_log2 in [8u32, 10] {
        group.bench_with_input(BenchmarkId::new("bec", 1u64 << n_log2), &n_log2, |b, &n| {
            b.iter(|| bec_bhattacharyya(n, 0.5).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("ga", 1u64 << n_log2), &n_log2, |b, &n| {
            b.iter(|| ga_evolve(n, 4.0).unwrap())
        });
    }
    group.finish();
}

fn capacity_solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("capacity");
    group.sample_size(20);
    group.bench_function("awgn_qam16", |b| {
        b.iter(|| awgn_capacity_qam(0.4, 4).unwrap())
    });
    group.bench_function("equivalent_sigma_2x2", |b| {
        b.iter(|| equivalent_awgn_sigma(0.5, 2, 2, 2).unwrap())
    });
    group.finish();
}

fn full_construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("construction");
    group.sample_size(10);
    group.bench_function("build_2x2_qpsk_n64", |b| {
        b.iter(|| build_construction(2, 2, 2, 64, 128, 0.5).unwrap())
    });
    group.finish();
}

criterion_group!(benches, reliability_recursions, capacity_solvers, full_construction);
criterion_main!(benches);
