use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use solwave::{newton_solve, NewtonSettings, WaveOperator};
use solwave_bench::{converged, seeded};

const SIZES: [usize; 3] = [64, 128, 256];

fn residual(c: &mut Criterion) {
    let mut group = c.benchmark_group("projected_residual");
    for n in SIZES {
        let (op, state) = converged(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &state, |b, s| {
            b.iter(|| op.projected_residual(black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn jacobian(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobian");
    group.sample_size(20);
    for n in SIZES {
        let (op, state) = converged(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &state, |b, s| {
            b.iter(|| op.jacobian(black_box(s)).unwrap())
        });
    }
    group.finish();
}

fn operator_setup(c: &mut Criterion) {
    let mut group = c.benchmark_group("operator_setup");
    for n in SIZES {
        let (op, _) = seeded(n);
        let basis = *op.basis();
        group.bench_with_input(BenchmarkId::from_parameter(n), &basis, |b, basis| {
            b.iter(|| WaveOperator::new(black_box(*basis)))
        });
    }
    group.finish();
}

fn newton(c: &mut Criterion) {
    let mut group = c.benchmark_group("newton_from_seed");
    group.sample_size(10);
    let settings = NewtonSettings::default();
    for n in SIZES {
        let (op, seed) = seeded(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &seed, |b, s| {
            b.iter(|| newton_solve(&op, black_box(s), &settings).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, residual, jacobian, operator_setup, newton);
criterion_main!(benches);
