//! Fixtures shared by the benchmarks in `benches/`.

use solwave::{newton_solve, seed_profile, ModeBasis, NewtonSettings, ReducedState, WaveOperator};

/// Cell size used by every benchmark.
pub const HALF_PERIOD: f64 = 64.0;

/// Operator and seed profile at `γ = -1`, `ε = 0.02` with `n` modes.
pub fn seeded(n: usize) -> (WaveOperator, ReducedState) {
    let basis = ModeBasis::new(HALF_PERIOD, n).expect("valid basis");
    let state = seed_profile(-1.0, 0.02, basis).expect("seed exists");
    (WaveOperator::new(basis), state)
}

/// As [`seeded`], but Newton-corrected.
pub fn converged(n: usize) -> (WaveOperator, ReducedState) {
    let (op, seed) = seeded(n);
    let (state, _) = newton_solve(&op, &seed, &NewtonSettings::default()).expect("seed converges");
    (op, state)
}
