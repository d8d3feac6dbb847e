//! Small-amplitude theory: the long-wave seed, the linear dispersion relation
//! and the reduced second-order equation with its homoclinic orbit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{Parameters, ReducedState};
use crate::strip::{dtn_symbol, Collocation, ModeBasis, SurfaceTrace};

/// `γ² - 3γ + 3`, the nonlinear coefficient of the reduced equation.
pub fn nonlinear_coefficient(gamma: f64) -> f64 {
    gamma * gamma - 3.0 * gamma + 3.0
}

/// Leading-order solitary wave `3ε/(γ² - 3γ + 3) sech²(√(3ε) x / 2)` at
/// `α = 1 - γ - ε`, projected onto the basis.
pub fn seed_profile(gamma: f64, eps: f64, basis: ModeBasis) -> Result<ReducedState> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let params = Parameters::new(gamma, Parameters::critical_alpha(gamma) - eps)?;
    let colloc = Collocation::new(basis);
    let w1 = seed_trace(gamma, eps, &colloc);
    ReducedState::new(basis, params, w1)
}

pub(crate) fn seed_trace(gamma: f64, eps: f64, colloc: &Collocation) -> SurfaceTrace {
    let amplitude = 3.0 * eps / nonlinear_coefficient(gamma);
    let rate = (3.0 * eps).sqrt() / 2.0;
    SurfaceTrace::from_function(colloc, |x| amplitude / (rate * x).cosh().powi(2))
}

/// Outcome of solving `k coth k = γ + α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DispersionRoot {
    /// Unique positive root.
    Wavenumber(f64),
    /// `γ + α = 1`: the root sits at `k = 0`.
    Critical,
    /// `γ + α < 1`: no real root; the trivial flow is supercritical.
    Absent,
}

impl DispersionRoot {
    pub fn wavenumber(&self) -> Option<f64> {
        match self {
            Self::Wavenumber(k) => Some(*k),
            _ => None,
        }
    }
}

/// Positive root of `k coth k = γ + α`, found by safeguarded Newton.
pub fn dispersion_root(gamma: f64, alpha: f64) -> DispersionRoot {
    let c = gamma + alpha;
    if (c - 1.0).abs() <= 1e-14 {
        return DispersionRoot::Critical;
    }
    if c < 1.0 {
        return DispersionRoot::Absent;
    }
    // k coth k ≥ max(1, k), so the root lies in (0, c].
    let g = |k: f64| dtn_symbol(k) - c;
    let (mut lo, mut hi) = (0.0, c);
    let mut k = (3.0 * (c - 1.0)).sqrt().min(c);
    for _ in 0..200 {
        let gk = g(k);
        if gk.abs() <= 4.0 * f64::EPSILON * c {
            break;
        }
        if gk < 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let sh = k.sinh();
        let dg = if k < 1e-4 {
            2.0 * k / 3.0
        } else {
            1.0 / k.tanh() - k / (sh * sh)
        };
        let next = k - gk / dg;
        k = if next > lo && next < hi && dg > 0.0 {
            next
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    DispersionRoot::Wavenumber(k)
}

/// A point `(X, Q, P = Q')` of the reduced equation `Q'' = 3Q - (3/2)(γ² - 3γ + 3)Q²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdePoint {
    pub x: f64,
    pub q: f64,
    pub p: f64,
}

pub fn reduced_ode_rhs(gamma: f64, q: f64, p: f64) -> (f64, f64) {
    (p, 3.0 * q - 1.5 * nonlinear_coefficient(gamma) * q * q)
}

/// Conserved energy `P²/2 - 3Q²/2 + (γ² - 3γ + 3) Q³/2`.
pub fn reduced_ode_energy(gamma: f64, q: f64, p: f64) -> f64 {
    0.5 * p * p - 1.5 * q * q + 0.5 * nonlinear_coefficient(gamma) * q * q * q
}

/// Homoclinic orbit `Q0 sech²(√3 X / 2)` with `Q0 = 3/(γ² - 3γ + 3)`.
pub fn explicit_homoclinic(gamma: f64, x: f64) -> OdePoint {
    let q0 = 3.0 / nonlinear_coefficient(gamma);
    let s = 1.0 / (0.5 * 3f64.sqrt() * x).cosh();
    let t = (0.5 * 3f64.sqrt() * x).tanh();
    OdePoint {
        x,
        q: q0 * s * s,
        p: -3f64.sqrt() * q0 * s * s * t,
    }
}

/// Eigenvalues of the linearisation at the origin, in increasing order.
pub fn origin_eigenvalues(gamma: f64) -> (f64, f64) {
    // Jacobian [[0, 1], [∂f/∂Q, 0]] of the first-order system at Q = 0.
    let h = 1e-6;
    let dfdq = (reduced_ode_rhs(gamma, h, 0.0).1 - reduced_ode_rhs(gamma, -h, 0.0).1) / (2.0 * h);
    let (trace, det) = (0.0, -dfdq);
    let disc = (trace * trace / 4.0 - det).sqrt();
    (trace / 2.0 - disc, trace / 2.0 + disc)
}

/// Classical fourth-order Runge–Kutta from `start` to `x_end`; the step is
/// shortened so the last point lands on `x_end`.
pub fn integrate_reduced_ode(gamma: f64, start: OdePoint, x_end: f64, step: f64) -> Result<Vec<OdePoint>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
    }
    let span = x_end - start.x;
    let n = ((span.abs() / step).ceil() as usize).max(1);
    let h = span / n as f64;
    let f = |q: f64, p: f64| reduced_ode_rhs(gamma, q, p);
    let mut out = Vec::with_capacity(n + 1);
    out.push(start);
    let (mut q, mut p) = (start.q, start.p);
    for i in 1..=n {
        let (k1q, k1p) = f(q, p);
        let (k2q, k2p) = f(q + 0.5 * h * k1q, p + 0.5 * h * k1p);
        let (k3q, k3p) = f(q + 0.5 * h * k2q, p + 0.5 * h * k2p);
        let (k4q, k4p) = f(q + h * k3q, p + h * k3p);
        q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        out.push(OdePoint {
            x: start.x + i as f64 * h,
            q,
            p,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispersion_cases() {
        let k = dispersion_root(0.0, 1.2).wavenumber().unwrap();
        assert!((dtn_symbol(k) - 1.2).abs() < 1e-12);
        // Reference root from a 30-digit solve.
        assert!((k - 0.790_283_592_486_904_8).abs() < 1e-13);
        assert_eq!(dispersion_root(0.0, 1.0), DispersionRoot::Critical);
        assert_eq!(dispersion_root(-1.0, 1.5), DispersionRoot::Absent);
        let big = dispersion_root(-2.0, 40.0).wavenumber().unwrap();
        assert!((dtn_symbol(big) - 38.0).abs() < 1e-12);
        let small = dispersion_root(0.0, 1.0 + 1e-9).wavenumber().unwrap();
        assert!((dtn_symbol(small) - (1.0 + 1e-9)).abs() < 1e-14);
    }

    #[test]
    fn homoclinic_amplitude_and_energy() {
        let h = explicit_homoclinic(-1.0, 0.0);
        assert!((h.q - 3.0 / 7.0).abs() < 1e-15);
        for &x in &[-3.0, -0.5, 0.7, 2.5] {
            let pt = explicit_homoclinic(-1.0, x);
            assert!(reduced_ode_energy(-1.0, pt.q, pt.p).abs() < 1e-14);
        }
    }

    #[test]
    fn origin_is_a_saddle_with_rates_sqrt3() {
        for &g in &[-2.0, -1.0, 0.0, 0.5] {
            let (lo, hi) = origin_eigenvalues(g);
            assert!((hi - 3f64.sqrt()).abs() < 1e-9);
            assert!((lo + 3f64.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn seed_crest_matches_amplitude() {
        let basis = ModeBasis::new(64.0, 128).unwrap();
        let s = seed_profile(-1.0, 0.1, basis).unwrap();
        assert!((s.crest() - 0.3 / 7.0).abs() < 1e-10);
        assert!((s.params.alpha - 1.9).abs() < 1e-15);
        assert!(seed_profile(0.0, 0.0, basis).is_err());
        assert!(seed_profile(0.0, 1.5, basis).is_err());
    }
}
