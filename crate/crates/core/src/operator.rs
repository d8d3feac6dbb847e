//! The reduced surface operator, its linearisation and the ellipticity checks.
//!
//! The unknowns are the surface traces of `w1 = η - y` and
//! `w2 = ζ - (1 - γ) y`. The kinematic condition is solved pointwise for
//! `w2 = -γ w1 - γ w1² / 2`, leaving the Bernoulli residual
//!
//! `F2 = A² - (1 - 2α w1) G`,
//! `A = γ (w1 + w1_y + w1 w1_y) + w2_y + 1`,
//! `G = w1_x² + (1 + w1_y)²`,
//!
//! as a function of the cosine coefficients of `w1` alone.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strip::{Collocation, ModeBasis, SurfaceTrace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    /// Dimensionless vorticity.
    pub gamma: f64,
    /// Inverse squared Froude number.
    pub alpha: f64,
}

impl Parameters {
    pub fn new(gamma: f64, alpha: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma must be finite, got {gamma}")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        Ok(Self { gamma, alpha })
    }

    /// The bifurcation value `1 - γ`.
    pub fn critical_alpha(gamma: f64) -> f64 {
        1.0 - gamma
    }

    pub fn froude(&self) -> f64 {
        1.0 / self.alpha.sqrt()
    }
}

/// A candidate solution: the trace of `w1` together with `(γ, α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub basis: ModeBasis,
    pub params: Parameters,
    pub w1: SurfaceTrace,
}

impl ReducedState {
    pub fn new(basis: ModeBasis, params: Parameters, w1: SurfaceTrace) -> Result<Self> {
        basis.check(w1.coeffs())?;
        Ok(Self { basis, params, w1 })
    }

    pub fn trivial(basis: ModeBasis, params: Parameters) -> Self {
        Self {
            w1: SurfaceTrace::zeros(&basis),
            basis,
            params,
        }
    }

    /// `w1(0, 1)`.
    pub fn crest(&self) -> f64 {
        self.w1.coeffs().iter().sum()
    }

    /// `w1(L, 1)`.
    pub fn edge(&self) -> f64 {
        self.w1
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, a)| if n % 2 == 0 { *a } else { -a })
            .sum()
    }

    /// Same state re-expressed with another truncation of the same half period.
    pub fn with_basis(&self, basis: ModeBasis) -> Self {
        Self {
            w1: self.w1.resized(&basis),
            basis,
            params: self.params,
        }
    }

    /// `1 + w1_y > 0` and `η > 0` on the surface, checked on the collocation
    /// nodes and both cell ends.
    pub fn is_admissible(&self, op: &WaveOperator) -> Result<bool> {
        let s = op.surface_samples(self)?;
        Ok(s.w1.iter().zip(&s.w1y).all(|(w, wy)| 1.0 + w > 0.0 && 1.0 + wy > 0.0))
    }
}

/// Nodal surface values of the unknowns and their derivatives.
#[derive(Debug, Clone)]
pub struct SurfaceFields {
    pub w1: Vec<f64>,
    pub w1x: Vec<f64>,
    pub w1y: Vec<f64>,
    pub w2: Vec<f64>,
    pub w2y: Vec<f64>,
    /// Cosine coefficients of the eliminated `w2` trace.
    pub w2_trace: SurfaceTrace,
}

/// Pointwise coefficients of the linearised boundary operators
/// `B1 = a11 ∂x + a12 ∂y (on w1) + a22 ∂y (on w2) + b1`, `B2 = c1 · + c2 ·`.
#[derive(Debug, Clone)]
pub struct LinearCoefficients {
    pub a11: Vec<f64>,
    pub a12: Vec<f64>,
    pub a21: Vec<f64>,
    pub a22: Vec<f64>,
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
}

/// Derivative of the nodal residual.
#[derive(Debug, Clone)]
pub struct Jacobian {
    /// `M × (N+1)` derivative with respect to the cosine coefficients of `w1`.
    pub coeffs: DMatrix<f64>,
    /// Derivative with respect to `α` at each node.
    pub alpha: Vec<f64>,
}

/// Branch monitors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monitor {
    /// `inf (1 - 2α w1)` on the surface.
    pub m1: f64,
    /// `inf |∇η|²` on the surface.
    pub m2: f64,
    /// Froude number `1/√α`.
    pub m3: f64,
    /// `sup |∇w1|` on the surface, the quantity that blows up when `γ > 0`.
    pub gradient_sup: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityDiscrepancy {
    pub absolute: f64,
    pub relative: f64,
}

/// Surface values at the collocation nodes and at `x = 0`, `x = L`.
#[derive(Debug, Clone)]
pub(crate) struct SurfaceSamples {
    pub w1: Vec<f64>,
    pub w1x: Vec<f64>,
    pub w1y: Vec<f64>,
}

/// Residual and Jacobian evaluation for one basis.
#[derive(Debug, Clone)]
pub struct WaveOperator {
    colloc: Collocation,
}

/// Trace of `w2` from the kinematic condition, sampled on the nodes and
/// projected back onto the basis.
pub fn eliminate_w2(w1: &SurfaceTrace, gamma: f64, colloc: &Collocation) -> Result<SurfaceTrace> {
    colloc.basis().check(w1.coeffs())?;
    let values: Vec<f64> = colloc
        .synthesize(w1.coeffs())
        .into_iter()
        .map(|w| -gamma * w - 0.5 * gamma * w * w)
        .collect();
    SurfaceTrace::new(colloc.basis(), colloc.project(&values))
}

impl WaveOperator {
    pub fn new(basis: ModeBasis) -> Self {
        Self {
            colloc: Collocation::new(basis),
        }
    }

    pub fn basis(&self) -> &ModeBasis {
        self.colloc.basis()
    }

    pub fn collocation(&self) -> &Collocation {
        &self.colloc
    }

    fn check(&self, state: &ReducedState) -> Result<()> {
        if state.basis != *self.basis() {
            return Err(Error::SizeMismatch {
                expected: self.basis().coefficient_count(),
                found: state.basis.coefficient_count(),
            });
        }
        self.basis().check(state.w1.coeffs())
    }

    pub fn fields(&self, state: &ReducedState) -> Result<SurfaceFields> {
        self.check(state)?;
        let c = &self.colloc;
        let a = state.w1.coeffs();
        let w2_trace = eliminate_w2(&state.w1, state.params.gamma, c)?;
        Ok(SurfaceFields {
            w1: c.synthesize(a),
            w1x: c.synthesize_dx(a),
            w1y: c.synthesize_normal(a),
            w2: c.synthesize(w2_trace.coeffs()),
            w2y: c.synthesize_normal(w2_trace.coeffs()),
            w2_trace,
        })
    }

    /// Nodal values of `F2`.
    pub fn residual(&self, state: &ReducedState) -> Result<Vec<f64>> {
        let f = self.fields(state)?;
        Ok(residual_from_fields(&f, &state.params))
    }

    /// Residual projected onto the basis, as cosine coefficients.
    pub fn projected_residual(&self, state: &ReducedState) -> Result<Vec<f64>> {
        Ok(self.colloc.project(&self.residual(state)?))
    }

    pub fn coefficients(&self, state: &ReducedState) -> Result<LinearCoefficients> {
        let f = self.fields(state)?;
        Ok(linear_coefficients(&f, &state.params))
    }

    pub fn jacobian(&self, state: &ReducedState) -> Result<Jacobian> {
        let f = self.fields(state)?;
        let lc = linear_coefficients(&f, &state.params);
        let c = &self.colloc;
        let (m, len) = (c.synthesis().nrows(), c.synthesis().ncols());
        let sigma = c.symbols();

        // Perturbing w1 perturbs the w2 trace by P(-c1 · C ẇ1).
        let scaled = DMatrix::from_fn(m, len, |j, n| -lc.c1[j] * c.synthesis()[(j, n)]);
        let w2_response = c.analysis() * scaled;
        let normal = DMatrix::from_fn(m, len, |j, n| c.synthesis()[(j, n)] * sigma[n]);
        let w2y_response = &normal * w2_response;

        let coeffs = DMatrix::from_fn(m, len, |j, n| {
            lc.a11[j] * c.synthesis_dx()[(j, n)]
                + lc.a12[j] * normal[(j, n)]
                + lc.b1[j] * c.synthesis()[(j, n)]
                + lc.a22[j] * w2y_response[(j, n)]
        });
        let alpha =
            f.w1.iter()
                .zip(&f.w1x)
                .zip(&f.w1y)
                .map(|((w, wx), wy)| 2.0 * w * (wx * wx + (1.0 + wy) * (1.0 + wy)))
                .collect();
        Ok(Jacobian { coeffs, alpha })
    }

    pub(crate) fn surface_samples(&self, state: &ReducedState) -> Result<SurfaceSamples> {
        self.check(state)?;
        let c = &self.colloc;
        let a = state.w1.coeffs();
        let mut w1 = c.synthesize(a);
        let mut w1x = c.synthesize_dx(a);
        let mut w1y = c.synthesize_normal(a);
        for end in [1.0, -1.0] {
            let mut sign = 1.0;
            let (mut v, mut vy) = (0.0, 0.0);
            for (n, an) in a.iter().enumerate() {
                v += sign * an;
                vy += sign * an * c.symbols()[n];
                sign *= end;
            }
            w1.push(v);
            w1x.push(0.0);
            w1y.push(vy);
        }
        Ok(SurfaceSamples { w1, w1x, w1y })
    }

    /// Infimum on the surface of `4 (1 - 2α w1)² |∇η|²`.
    pub fn lopatinskii_constant(&self, state: &ReducedState) -> Result<f64> {
        let s = self.surface_samples(state)?;
        let alpha = state.params.alpha;
        Ok((0..s.w1.len())
            .map(|j| {
                let d = 1.0 - 2.0 * alpha * s.w1[j];
                let g = s.w1x[j].powi(2) + (1.0 + s.w1y[j]).powi(2);
                4.0 * d * d * g
            })
            .fold(f64::INFINITY, f64::min))
    }

    /// Compares `(c1 a21 - c2 a11)² + (c1 a22 - c2 a12)²`, built from the
    /// linearisation coefficients, with `4 (1 - 2α w1)² |∇η|²` on every node.
    pub fn complementing_identity(&self, state: &ReducedState) -> Result<IdentityDiscrepancy> {
        let f = self.fields(state)?;
        let lc = linear_coefficients(&f, &state.params);
        let alpha = state.params.alpha;
        let mut out = IdentityDiscrepancy {
            absolute: 0.0,
            relative: 0.0,
        };
        for j in 0..f.w1.len() {
            let lhs = (lc.c1[j] * lc.a21[j] - lc.c2[j] * lc.a11[j]).powi(2)
                + (lc.c1[j] * lc.a22[j] - lc.c2[j] * lc.a12[j]).powi(2);
            let d = 1.0 - 2.0 * alpha * f.w1[j];
            let rhs = 4.0 * d * d * (f.w1x[j].powi(2) + (1.0 + f.w1y[j]).powi(2));
            let err = (lhs - rhs).abs();
            out.absolute = out.absolute.max(err);
            if rhs > 0.0 {
                out.relative = out.relative.max(err / rhs);
            } else {
                out.relative = out.relative.max(err);
            }
        }
        Ok(out)
    }

    pub fn monitor(&self, state: &ReducedState) -> Result<Monitor> {
        let s = self.surface_samples(state)?;
        let alpha = state.params.alpha;
        let mut out = Monitor {
            m1: f64::INFINITY,
            m2: f64::INFINITY,
            m3: state.params.froude(),
            gradient_sup: 0.0,
        };
        for j in 0..s.w1.len() {
            out.m1 = out.m1.min(1.0 - 2.0 * alpha * s.w1[j]);
            out.m2 = out.m2.min(s.w1x[j].powi(2) + (1.0 + s.w1y[j]).powi(2));
            out.gradient_sup = out.gradient_sup.max(s.w1x[j].hypot(s.w1y[j]));
        }
        Ok(out)
    }
}

pub(crate) fn residual_from_fields(f: &SurfaceFields, p: &Parameters) -> Vec<f64> {
    let (gamma, alpha) = (p.gamma, p.alpha);
    (0..f.w1.len())
        .map(|j| {
            let (w, wx, wy) = (f.w1[j], f.w1x[j], f.w1y[j]);
            let a = gamma * (w + wy + w * wy) + f.w2y[j] + 1.0;
            let g = wx * wx + (1.0 + wy) * (1.0 + wy);
            a * a - (1.0 - 2.0 * alpha * w) * g
        })
        .collect()
}

pub(crate) fn linear_coefficients(f: &SurfaceFields, p: &Parameters) -> LinearCoefficients {
    let (gamma, alpha) = (p.gamma, p.alpha);
    let m = f.w1.len();
    let mut lc = LinearCoefficients {
        a11: Vec::with_capacity(m),
        a12: Vec::with_capacity(m),
        a21: vec![0.0; m],
        a22: Vec::with_capacity(m),
        b1: Vec::with_capacity(m),
        b2: vec![0.0; m],
        c1: Vec::with_capacity(m),
        c2: vec![1.0; m],
    };
    for j in 0..m {
        let (w, wx, wy) = (f.w1[j], f.w1x[j], f.w1y[j]);
        let a = gamma * (w + wy + w * wy) + f.w2y[j] + 1.0;
        let g = wx * wx + (1.0 + wy) * (1.0 + wy);
        let d = 1.0 - 2.0 * alpha * w;
        lc.a11.push(-2.0 * d * wx);
        lc.a12.push(2.0 * gamma * a * (1.0 + w) - 2.0 * d * (1.0 + wy));
        lc.a22.push(2.0 * a);
        lc.b1.push(2.0 * gamma * (1.0 + wy) * a + 2.0 * alpha * g);
        lc.c1.push(gamma * (1.0 + w));
    }
    lc
}
