use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use solwave::continuation::BranchTracer;
use solwave::{diagnose, BranchConfig, ContinuationSettings, ModeBasis, NewtonSettings};
use solwave_bench::{converged, HALF_PERIOD};

fn arclength_steps(c: &mut Criterion) {
    let config = BranchConfig {
        gamma: -1.0,
        eps0: 0.01,
        basis: ModeBasis::new(HALF_PERIOD, 128).unwrap(),
        newton: NewtonSettings::default(),
        continuation: ContinuationSettings::default(),
    };
    let mut group = c.benchmark_group("continuation");
    group.sample_size(10);
    group.bench_function("seed_and_five_steps_n128", |b| {
        b.iter(|| {
            let mut tracer = BranchTracer::from_seed(black_box(config)).unwrap();
            for _ in 0..5 {
                tracer.advance().unwrap();
            }
            tracer.points().len()
        })
    });
    group.finish();
}

fn diagnostics(c: &mut Criterion) {
    let (op, state) = converged(128);
    let mut group = c.benchmark_group("diagnostics");
    group.sample_size(10);
    group.bench_function("diagnose_n128", |b| {
        b.iter(|| diagnose(&op, black_box(&state)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, arclength_steps, diagnostics);
criterion_main!(benches);
