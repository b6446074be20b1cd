use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use skydist_core::datagen::{gen_synthetic, Distribution, GenSpec};
use skydist_core::{skyline, skyline_bruteforce};

fn sequential(c: &mut Criterion) {
    let mut group = c.benchmark_group("skyline");
    for kind in [Distribution::Indi, Distribution::Corr, Distribution::Anti] {
        for n in [1_000, 10_000, 100_000] {
            let points = gen_synthetic(&GenSpec::new(kind, n, 1)).unwrap();
            group.bench_with_input(BenchmarkId::new(kind.to_string(), n), &points, |b, p| {
                b.iter(|| skyline(black_box(p)).unwrap())
            });
        }
    }
    group.finish();

    let mut group = c.benchmark_group("skyline_bruteforce");
    for n in [250, 1_000] {
        let points = gen_synthetic(&GenSpec::new(Distribution::Anti, n, 1)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &points, |b, p| {
            b.iter(|| skyline_bruteforce(black_box(p)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sequential);
criterion_main!(benches);
