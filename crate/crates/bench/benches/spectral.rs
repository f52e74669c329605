use std::hint::black_box;

use circlaw_core::ensembles::{sample_matrix, AtomDistribution};
use circlaw_core::linalg::{eigenvalues, least_singular_value, singular_values};
use circlaw_core::spectral::{esd_of_matrix, sup_distance, GridSpec};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn eigen(c: &mut Criterion) {
    let mut g = c.benchmark_group("eigenvalues");
    g.sample_size(10);
    for n in [32usize, 64, 128] {
        let a = sample_matrix(&AtomDistribution::ComplexGaussian, n, 1).unwrap().entries;
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| eigenvalues(black_box(a)).unwrap()));
    }
    g.finish();
}

fn singular(c: &mut Criterion) {
    let mut g = c.benchmark_group("singular");
    g.sample_size(10);
    for n in [32usize, 64] {
        let a = sample_matrix(&AtomDistribution::Bernoulli, n, 2).unwrap().entries;
        g.bench_with_input(BenchmarkId::new("least", n), &a, |b, a| b.iter(|| least_singular_value(black_box(a)).unwrap()));
        g.bench_with_input(BenchmarkId::new("all", n), &a, |b, a| b.iter(|| singular_values(black_box(a), true).unwrap()));
    }
    g.finish();
}

fn distance(c: &mut Criterion) {
    let sample = sample_matrix(&AtomDistribution::Bernoulli, 128, 3).unwrap();
    let esd = esd_of_matrix(&sample, 1.0, None).unwrap();
    let grid = GridSpec::square(-2.0, 2.0, 201).unwrap();
    c.bench_function("sup_distance_128", |b| b.iter(|| sup_distance(black_box(&esd), &grid).unwrap()));
}

criterion_group!(benches, eigen, singular, distance);
criterion_main!(benches);
