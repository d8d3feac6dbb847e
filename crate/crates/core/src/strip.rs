//! Harmonic functions on the strip `0 < y < 1` that vanish on the bed `y = 0`.
//!
//! A field is parametrised by the even cosine series of its trace on `y = 1`,
//! `t(x) = Σ a_n cos(k_n x)` with `k_n = nπ/L`. The harmonic extension is
//! `w(x, y) = a_0 y + Σ_{n≥1} a_n cos(k_n x) sinh(k_n y) / sinh(k_n)`, so the
//! Dirichlet-to-Neumann map acts diagonally with symbol `k coth k`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated cosine basis `cos(k_n x)`, `n = 0..=N`, on the half period `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeBasis {
    half_period: f64,
    mode_count: usize,
}

impl ModeBasis {
    pub fn new(half_period: f64, mode_count: usize) -> Result<Self> {
        if !(half_period.is_finite() && half_period > 0.0) {
            return Err(Error::InvalidBasis(format!(
                "half period must be positive and finite, got {half_period}"
            )));
        }
        if mode_count == 0 {
            return Err(Error::InvalidBasis("mode count must be at least 1".into()));
        }
        Ok(Self {
            half_period,
            mode_count,
        })
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    /// Highest mode index `N`.
    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    /// Number of coefficients, `N + 1`.
    pub fn coefficient_count(&self) -> usize {
        self.mode_count + 1
    }

    pub fn wavenumber(&self, n: usize) -> f64 {
        n as f64 * PI / self.half_period
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..=self.mode_count).map(|n| self.wavenumber(n)).collect()
    }

    /// Number of collocation nodes, `M = 2N`.
    pub fn node_count(&self) -> usize {
        2 * self.mode_count
    }

    /// Midpoint nodes `x_j = (j + 1/2) L / M`.
    pub fn nodes(&self) -> Vec<f64> {
        let m = self.node_count();
        (0..m).map(|j| (j as f64 + 0.5) * self.half_period / m as f64).collect()
    }

    /// Same half period with a different truncation.
    pub fn with_mode_count(&self, mode_count: usize) -> Result<Self> {
        Self::new(self.half_period, mode_count)
    }

    pub(crate) fn check(&self, coeffs: &[f64]) -> Result<()> {
        if coeffs.len() != self.coefficient_count() {
            return Err(Error::SizeMismatch {
                expected: self.coefficient_count(),
                found: coeffs.len(),
            });
        }
        Ok(())
    }
}

/// Cosine coefficients of a surface trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceTrace {
    coeffs: Vec<f64>,
}

impl SurfaceTrace {
    pub fn new(basis: &ModeBasis, coeffs: Vec<f64>) -> Result<Self> {
        basis.check(&coeffs)?;
        Ok(Self { coeffs })
    }

    pub fn zeros(basis: &ModeBasis) -> Self {
        Self {
            coeffs: vec![0.0; basis.coefficient_count()],
        }
    }

    /// Samples `f` on the collocation nodes and projects onto the basis.
    pub fn from_function(colloc: &Collocation, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = colloc.nodes().iter().map(|&x| f(x)).collect();
        Self {
            coeffs: colloc.project(&values),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Value of the series at `x`.
    pub fn value_at(&self, basis: &ModeBasis, x: f64) -> Result<f64> {
        basis.check(&self.coeffs)?;
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a * (basis.wavenumber(n) * x).cos())
            .sum())
    }

    /// Zero-padded or truncated copy expressed in `basis`.
    pub fn resized(&self, basis: &ModeBasis) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(basis.coefficient_count(), 0.0);
        Self { coeffs }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * factor).collect(),
        }
    }

    /// Sum of two traces; the shorter is zero-padded.
    pub fn plus(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|n| self.coeffs.get(n).unwrap_or(&0.0) + other.coeffs.get(n).unwrap_or(&0.0))
            .collect();
        Self { coeffs }
    }
}

/// Sine series `Σ b_n sin(k_n x)`, the x-derivative of a [`SurfaceTrace`].
#[derive(Debug, Clone, PartialEq)]
pub struct SineSeries {
    coeffs: Vec<f64>,
}

impl SineSeries {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value_at(&self, basis: &ModeBasis, x: f64) -> Result<f64> {
        basis.check(&self.coeffs)?;
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, b)| b * (basis.wavenumber(n) * x).sin())
            .sum())
    }
}

/// `k coth k`, continued to the value 1 at `k = 0`.
pub fn dtn_symbol(k: f64) -> f64 {
    let k = k.abs();
    if k < 1e-4 {
        1.0 + k * k / 3.0
    } else {
        k / k.tanh()
    }
}

/// `sinh(k y) / sinh(k)` without overflow for large `k`.
pub fn sinh_ratio(k: f64, y: f64) -> f64 {
    if k == 0.0 {
        return y;
    }
    (k * (y - 1.0)).exp() * ((-2.0 * k * y).exp_m1() / (-2.0 * k).exp_m1())
}

/// `k cosh(k y) / sinh(k)`, the y-derivative of [`sinh_ratio`].
pub fn cosh_ratio(k: f64, y: f64) -> f64 {
    if k == 0.0 {
        return 1.0;
    }
    k * (k * (y - 1.0)).exp() * (1.0 + (-2.0 * k * y).exp()) / -(-2.0 * k).exp_m1()
}

/// Normal derivative on `y = 1` of the harmonic extension of `t`.
pub fn dtn_apply(t: &SurfaceTrace, basis: &ModeBasis) -> Result<SurfaceTrace> {
    basis.check(&t.coeffs)?;
    let coeffs = t
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, a)| a * dtn_symbol(basis.wavenumber(n)))
        .collect();
    Ok(SurfaceTrace { coeffs })
}

pub fn trace_x_derivative(t: &SurfaceTrace, basis: &ModeBasis) -> Result<SineSeries> {
    basis.check(&t.coeffs)?;
    let coeffs = t
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, a)| -basis.wavenumber(n) * a)
        .collect();
    Ok(SineSeries { coeffs })
}

/// Value and gradient of the harmonic extension at `(x, y)`.
pub fn evaluate_with_gradient(t: &SurfaceTrace, basis: &ModeBasis, x: f64, y: f64) -> Result<(f64, f64, f64)> {
    basis.check(&t.coeffs)?;
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::OutsideStrip(y));
    }
    let (mut w, mut wx, mut wy) = (0.0, 0.0, 0.0);
    for (n, &a) in t.coeffs.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let k = basis.wavenumber(n);
        let (s, c) = (k * x).sin_cos();
        let sr = sinh_ratio(k, y);
        w += a * c * sr;
        wx -= a * k * s * sr;
        wy += a * c * cosh_ratio(k, y);
    }
    Ok((w, wx, wy))
}

pub fn evaluate_interior(t: &SurfaceTrace, basis: &ModeBasis, x: f64, y: f64) -> Result<f64> {
    evaluate_with_gradient(t, basis, x, y).map(|(w, _, _)| w)
}

pub fn evaluate_gradient_interior(t: &SurfaceTrace, basis: &ModeBasis, x: f64, y: f64) -> Result<(f64, f64)> {
    evaluate_with_gradient(t, basis, x, y).map(|(_, wx, wy)| (wx, wy))
}

/// Transform matrices between coefficients and values on the midpoint grid.
///
/// With `M = 2N` midpoints the discrete cosine sums are exactly orthogonal for
/// all modes up to `N`, so `project(synthesize(a)) == a` to rounding.
#[derive(Debug, Clone)]
pub struct Collocation {
    basis: ModeBasis,
    nodes: Vec<f64>,
    synthesis: DMatrix<f64>,
    synthesis_dx: DMatrix<f64>,
    analysis: DMatrix<f64>,
    symbols: Vec<f64>,
}

impl Collocation {
    pub fn new(basis: ModeBasis) -> Self {
        let m = basis.node_count();
        let len = basis.coefficient_count();
        // cos(nπ(2j+1)/2M) with the phase reduced exactly modulo 4M.
        let period = 4 * m;
        let phase = |n: usize, j: usize| {
            let p = (n * (2 * j + 1)) % period;
            PI * p as f64 / (2 * m) as f64
        };
        let synthesis = DMatrix::from_fn(m, len, |j, n| phase(n, j).cos());
        let synthesis_dx = DMatrix::from_fn(m, len, |j, n| -basis.wavenumber(n) * phase(n, j).sin());
        let analysis = DMatrix::from_fn(len, m, |n, j| {
            let weight = if n == 0 { 1.0 } else { 2.0 } / m as f64;
            weight * phase(n, j).cos()
        });
        let symbols = basis.wavenumbers().into_iter().map(dtn_symbol).collect();
        Self {
            basis,
            nodes: basis.nodes(),
            synthesis,
            synthesis_dx,
            analysis,
            symbols,
        }
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `M × (N+1)` matrix of `cos(k_n x_j)`.
    pub fn synthesis(&self) -> &DMatrix<f64> {
        &self.synthesis
    }

    /// `M × (N+1)` matrix of `-k_n sin(k_n x_j)`.
    pub fn synthesis_dx(&self) -> &DMatrix<f64> {
        &self.synthesis_dx
    }

    /// `(N+1) × M` discrete cosine projection.
    pub fn analysis(&self) -> &DMatrix<f64> {
        &self.analysis
    }

    /// `k_n coth k_n` for each mode.
    pub fn symbols(&self) -> &[f64] {
        &self.symbols
    }

    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        mat_vec(&self.synthesis, coeffs)
    }

    pub fn synthesize_dx(&self, coeffs: &[f64]) -> Vec<f64> {
        mat_vec(&self.synthesis_dx, coeffs)
    }

    /// Nodal values of the normal derivative on `y = 1`.
    pub fn synthesize_normal(&self, coeffs: &[f64]) -> Vec<f64> {
        let scaled: Vec<f64> = coeffs.iter().zip(&self.symbols).map(|(a, s)| a * s).collect();
        self.synthesize(&scaled)
    }

    pub fn project(&self, values: &[f64]) -> Vec<f64> {
        mat_vec(&self.analysis, values)
    }
}

fn mat_vec(matrix: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    assert_eq!(matrix.ncols(), v.len(), "vector length does not match transform");
    let mut out = vec![0.0; matrix.nrows()];
    for (col, &vj) in matrix.column_iter().zip(v) {
        if vj == 0.0 {
            continue;
        }
        for (o, c) in out.iter_mut().zip(col.iter()) {
            *o += c * vj;
        }
    }
    out
}
