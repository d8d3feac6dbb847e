//! Invariants and a-posteriori checks on converged solutions: flow force,
//! conjugate depths, the surface identities, velocity reconstruction,
//! stagnation scans and the physical surface.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::continuation::{nodal_check, NodalReport};
use crate::error::{Error, Result};
use crate::operator::{eliminate_w2, IdentityDiscrepancy, Monitor, Parameters, ReducedState, WaveOperator};
use crate::quadrature::GaussLegendre;
use crate::strip::{cosh_ratio, evaluate_with_gradient, sinh_ratio, ModeBasis, SurfaceTrace};

/// Quadrature points used for every vertical integral.
pub const VERTICAL_POINTS: usize = 64;

/// Both harmonic unknowns of a solution, ready for interior evaluation.
#[derive(Debug, Clone)]
pub struct SolutionFields {
    pub basis: ModeBasis,
    pub params: Parameters,
    pub w1: SurfaceTrace,
    pub w2: SurfaceTrace,
}

/// `η`, `ζ` and their first derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub eta: f64,
    pub eta_x: f64,
    pub eta_y: f64,
    pub zeta: f64,
    pub zeta_x: f64,
    pub zeta_y: f64,
}

/// Values on a tensor grid, indexed `[(row for y, column for x)]`.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub eta: DMatrix<f64>,
    pub eta_x: DMatrix<f64>,
    pub eta_y: DMatrix<f64>,
    pub zeta_x: DMatrix<f64>,
    pub zeta_y: DMatrix<f64>,
}

impl SolutionFields {
    pub fn new(op: &WaveOperator, state: &ReducedState) -> Result<Self> {
        let w2 = eliminate_w2(&state.w1, state.params.gamma, op.collocation())?;
        Ok(Self {
            basis: state.basis,
            params: state.params,
            w1: state.w1.clone(),
            w2,
        })
    }

    pub fn at(&self, x: f64, y: f64) -> Result<FieldPoint> {
        let (w1, w1x, w1y) = evaluate_with_gradient(&self.w1, &self.basis, x, y)?;
        let (w2, w2x, w2y) = evaluate_with_gradient(&self.w2, &self.basis, x, y)?;
        let gamma = self.params.gamma;
        Ok(FieldPoint {
            eta: y + w1,
            eta_x: w1x,
            eta_y: 1.0 + w1y,
            zeta: (1.0 - gamma) * y + w2,
            zeta_x: w2x,
            zeta_y: 1.0 - gamma + w2y,
        })
    }

    /// Evaluates the fields on `xs × ys` with dense products.
    pub fn grid(&self, xs: &[f64], ys: &[f64]) -> Result<FieldGrid> {
        if let Some(&y) = ys.iter().find(|y| !(0.0..=1.0).contains(*y)) {
            return Err(Error::OutsideStrip(y));
        }
        let ks = self.basis.wavenumbers();
        let len = ks.len();
        let cos = DMatrix::from_fn(len, xs.len(), |n, j| (ks[n] * xs[j]).cos());
        let msin = DMatrix::from_fn(len, xs.len(), |n, j| -ks[n] * (ks[n] * xs[j]).sin());
        let profile =
            |a: &[f64], f: fn(f64, f64) -> f64| DMatrix::from_fn(ys.len(), len, |i, n| a[n] * f(ks[n], ys[i]));
        let (a1, a2) = (self.w1.coeffs(), self.w2.coeffs());
        let s1 = profile(a1, sinh_ratio);
        let c1 = profile(a1, cosh_ratio);
        let s2 = profile(a2, sinh_ratio);
        let c2 = profile(a2, cosh_ratio);
        let gamma = self.params.gamma;
        let mut eta = &s1 * &cos;
        for (i, &y) in ys.iter().enumerate() {
            for j in 0..xs.len() {
                eta[(i, j)] += y;
            }
        }
        Ok(FieldGrid {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            eta,
            eta_x: &s1 * &msin,
            eta_y: (&c1 * &cos).add_scalar(1.0),
            zeta_x: &s2 * &msin,
            zeta_y: (&c2 * &cos).add_scalar(1.0 - gamma),
        })
    }
}

fn flow_force_integrand(eta_x: f64, eta_y: f64, zeta_x: f64, zeta_y: f64) -> Option<f64> {
    let d = eta_x * eta_x + eta_y * eta_y;
    if d == 0.0 {
        return None;
    }
    Some((eta_y * (zeta_y * zeta_y - zeta_x * zeta_x) + 2.0 * eta_x * zeta_x * zeta_y) / d)
}

fn flow_force_boundary(params: &Parameters, eta: f64) -> f64 {
    let (g, a) = (params.gamma, params.alpha);
    g * g * eta.powi(3) / 6.0 + a * eta * eta / 2.0 - (2.0 * a + 1.0) * eta / 2.0
}

/// Vertical integrals over the rule's nodes at each station `x`.
fn vertical_integrals(
    fields: &SolutionFields,
    xs: &[f64],
    quad: &GaussLegendre,
    extra: impl Fn(&FieldGrid, usize, usize) -> f64,
) -> Result<Vec<f64>> {
    let grid = fields.grid(xs, &quad.nodes)?;
    let mut out = vec![0.0; xs.len()];
    for (j, o) in out.iter_mut().enumerate() {
        for (i, w) in quad.weights.iter().enumerate() {
            let value = flow_force_integrand(
                grid.eta_x[(i, j)],
                grid.eta_y[(i, j)],
                grid.zeta_x[(i, j)],
                grid.zeta_y[(i, j)],
            )
            .ok_or(Error::VanishingDenominator {
                x: xs[j],
                y: quad.nodes[i],
            })?;
            *o += w * (value + extra(&grid, i, j));
        }
    }
    Ok(out)
}

/// Flow force at each station: half the vertical integral of the momentum
/// flux minus the surface terms.
pub fn flow_force(fields: &SolutionFields, stations: &[f64]) -> Result<Vec<f64>> {
    let quad = GaussLegendre::new(VERTICAL_POINTS);
    let integrals = vertical_integrals(fields, stations, &quad, |_, _, _| 0.0)?;
    stations
        .iter()
        .zip(integrals)
        .map(|(&x, integral)| {
            let eta = 1.0 + fields.w1.value_at(&fields.basis, x)?;
            Ok(0.5 * integral - flow_force_boundary(&fields.params, eta))
        })
        .collect()
}

/// Stations `0, L/8, …, L`.
pub fn default_stations(basis: &ModeBasis) -> Vec<f64> {
    (0..=8).map(|i| basis.half_period() * i as f64 / 8.0).collect()
}

pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// Flow force of the uniform flow of unit depth.
pub fn trivial_flow_force(gamma: f64, alpha: f64) -> f64 {
    1.0 - gamma + gamma * gamma / 3.0 + alpha / 2.0
}

/// `Q̂(d)` for the shear flow of depth `d` carrying the same flux and vorticity.
pub fn qhat(gamma: f64, alpha: f64, d: f64) -> f64 {
    ((2.0 - gamma) / (2.0 * d) + gamma * d / 2.0).powi(2) + 2.0 * alpha * (d - 1.0)
}

pub fn qhat_derivative(gamma: f64, alpha: f64, d: f64) -> f64 {
    let inner = (2.0 - gamma) / (2.0 * d) + gamma * d / 2.0;
    let dinner = -(2.0 - gamma) / (2.0 * d * d) + gamma / 2.0;
    2.0 * inner * dinner + 2.0 * alpha
}

/// `Ŝ(d)`, normalised so that `Ŝ'(d) = (Q̂(1) - Q̂(d)) / 2`.
pub fn shat(gamma: f64, alpha: f64, d: f64) -> f64 {
    let q1 = qhat(gamma, alpha, 1.0);
    (2.0 - gamma).powi(2) / (8.0 * d) - gamma * gamma * d.powi(3) / 24.0 - (2.0 - gamma) * gamma * d / 4.0 + d * alpha
        - d * d * alpha / 2.0
        + q1 * d / 2.0
}

fn check_conjugate_params(gamma: f64, alpha: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma < 2.0) {
        return Err(Error::InvalidParameter(format!("gamma must be below 2, got {gamma}")));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

/// Root of `f` in `[lo, hi]` with `f(lo) < 0 < f(hi)`, by bisection
/// accelerated with the secant step.
fn bracketed_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let (mut flo, mut fhi) = (f(lo), f(hi));
    for _ in 0..400 {
        let secant = lo - flo * (hi - lo) / (fhi - flo);
        let mid = 0.5 * (lo + hi);
        let x = if secant > lo && secant < hi && (hi - lo) < 0.5 * hi.abs().max(1.0) {
            secant
        } else {
            mid
        };
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        // Alternate with a bisection to guarantee shrinkage.
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm < 0.0 {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi.abs() {
            break;
        }
    }
    if flo.abs() < fhi.abs() {
        lo
    } else {
        hi
    }
}

/// Minimiser of the strictly convex `Q̂`.
pub fn critical_depth(gamma: f64, alpha: f64) -> Result<f64> {
    check_conjugate_params(gamma, alpha)?;
    let dq = |d: f64| qhat_derivative(gamma, alpha, d);
    let mut lo = 1.0;
    while dq(lo) >= 0.0 {
        lo *= 0.5;
    }
    let mut hi = 1.0;
    while dq(hi) <= 0.0 {
        hi *= 2.0;
    }
    Ok(bracketed_root(dq, lo, hi))
}

/// The depth `d ≠ 1` with `Q̂(d) = Q̂(1)`.
pub fn conjugate_depth(gamma: f64, alpha: f64) -> Result<f64> {
    check_conjugate_params(gamma, alpha)?;
    let alpha_cr = Parameters::critical_alpha(gamma);
    if (alpha - alpha_cr).abs() <= 1e-12 * alpha_cr.abs().max(1.0) {
        return Err(Error::Degenerate(format!(
            "alpha = {alpha} equals the critical value 1 - gamma; the conjugate depth coincides with 1"
        )));
    }
    let dcr = critical_depth(gamma, alpha)?;
    let q1 = qhat(gamma, alpha, 1.0);
    let g = |d: f64| qhat(gamma, alpha, d) - q1;
    if alpha < alpha_cr {
        let mut hi = 2.0 * dcr;
        while g(hi) <= 0.0 {
            hi *= 2.0;
        }
        Ok(bracketed_root(g, dcr, hi))
    } else {
        let mut lo = 0.5 * dcr;
        while g(lo) <= 0.0 {
            lo *= 0.5;
        }
        Ok(bracketed_root(|d| -g(d), lo, dcr))
    }
}

/// `max |Φ(x, 1) - (α + γ²)(η - 1)² - (γ²/3)(η - 1)³|` over the stations,
/// with `Φ(x, 1)` obtained by vertical quadrature.
pub fn phi_surface_check(fields: &SolutionFields, stations: &[f64]) -> Result<f64> {
    let quad = GaussLegendre::new(VERTICAL_POINTS);
    let gamma = fields.params.gamma;
    let alpha = fields.params.alpha;
    let phi = vertical_integrals(fields, stations, &quad, |g, i, j| {
        (1.0 - gamma * gamma) * g.eta_y[(i, j)] + 2.0 * (gamma - 1.0)
    })?;
    let mut worst: f64 = 0.0;
    for (&x, p) in stations.iter().zip(phi) {
        let e = fields.w1.value_at(&fields.basis, x)?;
        let rhs = (alpha + gamma * gamma) * e * e + gamma * gamma / 3.0 * e.powi(3);
        worst = worst.max((p - rhs).abs());
    }
    Ok(worst)
}

/// Up to 129 stations spread over `[0, L]`, always including both ends.
pub fn surface_stations(basis: &ModeBasis) -> Vec<f64> {
    let count = basis.node_count().min(128);
    (0..=count)
        .map(|i| basis.half_period() * i as f64 / count as f64)
        .collect()
}

/// Relative mismatch in
/// `(1 - α - γ) ∫w1 = α ∫w1 w1_y + ((α + γ²)/2) ∫w1² + (γ²/6) ∫w1³`
/// over one period of the surface.
pub fn integral_identity_check(op: &WaveOperator, state: &ReducedState) -> Result<f64> {
    let c = op.collocation();
    let a = state.w1.coeffs();
    op.basis().check(a)?;
    let w = c.synthesize(a);
    let wy = c.synthesize_normal(a);
    let (g, al) = (state.params.gamma, state.params.alpha);
    // The midpoint rule integrates every product of these series exactly.
    let mean = |f: &dyn Fn(usize) -> f64| (0..w.len()).map(f).sum::<f64>() / w.len() as f64;
    let lhs = (1.0 - al - g) * mean(&|j| w[j]);
    let rhs = al * mean(&|j| w[j] * wy[j])
        + 0.5 * (al + g * g) * mean(&|j| w[j] * w[j])
        + g * g / 6.0 * mean(&|j| w[j].powi(3));
    let scale = lhs.abs().max(rhs.abs());
    Ok(if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale })
}

/// Velocity `(u, v)` relative to the wave at a point of the strip.
pub fn velocity(fields: &SolutionFields, x: f64, y: f64) -> Result<(f64, f64)> {
    let p = fields.at(x, y)?;
    velocity_from(p.eta, p.eta_x, p.eta_y, p.zeta_x, p.zeta_y, fields.params.gamma)
        .ok_or(Error::VanishingDenominator { x, y })
}

fn velocity_from(eta: f64, ex: f64, ey: f64, zx: f64, zy: f64, gamma: f64) -> Option<(f64, f64)> {
    let d = ex * ex + ey * ey;
    if d == 0.0 {
        return None;
    }
    Some(((ex * zx + ey * zy) / d + gamma * eta, (ex * zy - ey * zx) / d))
}

/// Largest deviations on the surface nodes from Bernoulli's law
/// `u² + v² + 2α(η - 1) = 1` and from tangency `u η_x - v η_y = 0`.
pub fn surface_velocity_check(fields: &SolutionFields, op: &WaveOperator) -> Result<(f64, f64)> {
    let xs = op.collocation().nodes();
    let g = fields.grid(xs, &[1.0])?;
    let (mut dynamic, mut kinematic): (f64, f64) = (0.0, 0.0);
    for (j, &x) in xs.iter().enumerate() {
        let (ex, ey) = (g.eta_x[(0, j)], g.eta_y[(0, j)]);
        let (u, v) = velocity_from(
            g.eta[(0, j)],
            ex,
            ey,
            g.zeta_x[(0, j)],
            g.zeta_y[(0, j)],
            fields.params.gamma,
        )
        .ok_or(Error::VanishingDenominator { x, y: 1.0 })?;
        dynamic = dynamic.max((u * u + v * v + 2.0 * fields.params.alpha * (g.eta[(0, j)] - 1.0) - 1.0).abs());
        kinematic = kinematic.max((u * ex - v * ey).abs());
    }
    Ok((dynamic, kinematic))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StagnationPoint {
    pub x: f64,
    pub y: f64,
    /// `u² + v²` at the grid point.
    pub speed_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StagnationReport {
    pub points: Vec<StagnationPoint>,
    /// `(x, y)` midway between vertically adjacent grid points where `u` changes sign.
    pub critical_layers: Vec<[f64; 2]>,
}

/// Local minima of `u² + v²` below `10⁻⁴` and sign changes of `u` on a
/// uniform `nx × ny` grid over `[0, L] × [0, 1]`.
pub fn stagnation_scan(fields: &SolutionFields, nx: usize, ny: usize) -> Result<StagnationReport> {
    let nx = nx.max(2);
    let ny = ny.max(2);
    let l = fields.basis.half_period();
    let xs: Vec<f64> = (0..nx).map(|j| l * j as f64 / (nx - 1) as f64).collect();
    let ys: Vec<f64> = (0..ny).map(|i| i as f64 / (ny - 1) as f64).collect();
    let g = fields.grid(&xs, &ys)?;
    let mut u = DMatrix::zeros(ny, nx);
    let mut speed = DMatrix::zeros(ny, nx);
    for i in 0..ny {
        for j in 0..nx {
            let (uu, vv) = velocity_from(
                g.eta[(i, j)],
                g.eta_x[(i, j)],
                g.eta_y[(i, j)],
                g.zeta_x[(i, j)],
                g.zeta_y[(i, j)],
                fields.params.gamma,
            )
            .ok_or(Error::VanishingDenominator { x: xs[j], y: ys[i] })?;
            u[(i, j)] = uu;
            speed[(i, j)] = uu * uu + vv * vv;
        }
    }
    let mut points = Vec::new();
    for i in 0..ny {
        for j in 0..nx {
            let s = speed[(i, j)];
            if s >= 1e-4 {
                continue;
            }
            let neighbours = [(i.wrapping_sub(1), j), (i + 1, j), (i, j.wrapping_sub(1)), (i, j + 1)];
            let is_min = neighbours
                .iter()
                .filter(|(a, b)| *a < ny && *b < nx)
                .all(|&(a, b)| speed[(a, b)] >= s);
            if is_min {
                points.push(StagnationPoint {
                    x: xs[j],
                    y: ys[i],
                    speed_squared: s,
                });
            }
        }
    }
    let mut critical_layers = Vec::new();
    for j in 0..nx {
        for i in 0..ny - 1 {
            if u[(i, j)] * u[(i + 1, j)] < 0.0 {
                critical_layers.push([xs[j], 0.5 * (ys[i] + ys[i + 1])]);
            }
        }
    }
    Ok(StagnationReport {
        points,
        critical_layers,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSurface {
    /// `(X, Y) = (ξ(x, 1), η(x, 1))` for increasing `x` in `[0, L]`.
    pub points: Vec<[f64; 2]>,
    /// `ξ_x < 0` somewhere on the surface.
    pub overhang: bool,
}

/// Maps the surface back to physical coordinates through the harmonic
/// conjugate `ξ` of `η`, normalised by `ξ(0, 1) = 0`.
pub fn reconstruct_surface(op: &WaveOperator, state: &ReducedState, samples: usize) -> Result<PhysicalSurface> {
    let basis = op.basis();
    let a = state.w1.coeffs();
    basis.check(a)?;
    let samples = samples.max(2);
    let ks = basis.wavenumbers();
    let l = basis.half_period();
    let points = (0..samples)
        .map(|i| {
            let x = l * i as f64 / (samples - 1) as f64;
            let mut xi = (1.0 + a[0]) * x;
            let mut y = 1.0 + a[0];
            for n in 1..a.len() {
                let (s, c) = (ks[n] * x).sin_cos();
                xi += a[n] * cosh_ratio(ks[n], 1.0) / ks[n] * s;
                y += a[n] * c;
            }
            [xi, y]
        })
        .collect();
    let xi_x = op.collocation().synthesize_normal(a);
    let ends = [
        a.iter()
            .zip(op.collocation().symbols())
            .map(|(an, s)| an * s)
            .sum::<f64>(),
        a.iter()
            .zip(op.collocation().symbols())
            .enumerate()
            .map(|(n, (an, s))| if n % 2 == 0 { an * s } else { -an * s })
            .sum::<f64>(),
    ];
    let overhang = xi_x.iter().chain(&ends).any(|v| 1.0 + v < 0.0);
    Ok(PhysicalSurface { points, overhang })
}

/// Physical position `(ξ, η)` of the strip point `(x, y)`, with `ξ` the
/// harmonic conjugate of `η` normalised by `ξ(0, y) = 0`.
pub fn physical_point(fields: &SolutionFields, x: f64, y: f64) -> Result<[f64; 2]> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::OutsideStrip(y));
    }
    let a = fields.w1.coeffs();
    let ks = fields.basis.wavenumbers();
    let mut xi = (1.0 + a[0]) * x;
    let mut eta = (1.0 + a[0]) * y;
    for n in 1..a.len() {
        let (s, c) = (ks[n] * x).sin_cos();
        xi += a[n] * cosh_ratio(ks[n], y) / ks[n] * s;
        eta += a[n] * sinh_ratio(ks[n], y) * c;
    }
    Ok([xi, eta])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiBoundReport {
    pub holds: bool,
    /// The bound being tested.
    pub bound: f64,
    /// `sup ψ_y` when `γ < 0`, `inf ψ_y` otherwise, on the surface.
    pub extreme: f64,
}

/// Bounds on `ψ_y` along the surface: `ψ_y < 1 - γ/2` for `γ < 0`, and
/// `ψ_y > min{2 - γ, γ inf |∇η|²}` for `γ ≥ 0`.
pub fn psi_bound_check(op: &WaveOperator, state: &ReducedState) -> Result<PsiBoundReport> {
    let f = op.fields(state)?;
    let gamma = state.params.gamma;
    let psi_y: Vec<f64> = (0..f.w1.len())
        .map(|j| gamma * (f.w1[j] + f.w1y[j] + f.w1[j] * f.w1y[j]) + f.w2y[j] + 1.0)
        .collect();
    if gamma < 0.0 {
        let extreme = psi_y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let bound = 1.0 - gamma / 2.0;
        return Ok(PsiBoundReport {
            holds: extreme < bound,
            bound,
            extreme,
        });
    }
    // |∇η|² = |f'|² with f holomorphic, so its infimum over the strip is
    // attained on the surface, on the bed, or at infinity where it equals 1.
    let c = op.collocation();
    let a = state.w1.coeffs();
    let bed: Vec<f64> = {
        let scaled: Vec<f64> = a
            .iter()
            .zip(op.basis().wavenumbers())
            .map(|(an, k)| an * cosh_ratio(k, 0.0))
            .collect();
        c.synthesize(&scaled)
    };
    let mut grad_inf: f64 = 1.0;
    for (j, b) in bed.iter().enumerate() {
        grad_inf = grad_inf.min(f.w1x[j].powi(2) + (1.0 + f.w1y[j]).powi(2));
        grad_inf = grad_inf.min((1.0 + b).powi(2));
    }
    let extreme = psi_y.iter().copied().fold(f64::INFINITY, f64::min);
    let bound = (2.0 - gamma).min(gamma * grad_inf);
    Ok(PsiBoundReport {
        holds: extreme > bound,
        bound,
        extreme,
    })
}

/// Everything recorded per branch point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub gamma: f64,
    pub alpha: f64,
    pub froude: f64,
    pub crest: f64,
    pub flow_force_values: Vec<f64>,
    pub flow_force_spread: f64,
    pub trivial_flow_force: f64,
    pub phi_identity_residual: f64,
    pub integral_identity_residual: f64,
    pub lopatinskii: f64,
    pub complementing_identity: IdentityDiscrepancy,
    pub monitor: Monitor,
    pub nodal: NodalReport,
    pub overhang: bool,
    pub stagnation_points: Vec<StagnationPoint>,
    pub critical_layers: Vec<[f64; 2]>,
    pub psi_bound: PsiBoundReport,
    pub psi_bound_ok: bool,
    /// Bernoulli and tangency residuals of the reconstructed surface velocity.
    pub surface_dynamic_residual: f64,
    pub surface_kinematic_residual: f64,
}

pub fn diagnose(op: &WaveOperator, state: &ReducedState) -> Result<DiagnosticsReport> {
    let fields = SolutionFields::new(op, state)?;
    let flow_force_values = flow_force(&fields, &default_stations(op.basis()))?;
    let stagnation = stagnation_scan(&fields, 129, 33)?;
    let psi_bound = psi_bound_check(op, state)?;
    let (dynamic, kinematic) = surface_velocity_check(&fields, op)?;
    Ok(DiagnosticsReport {
        gamma: state.params.gamma,
        alpha: state.params.alpha,
        froude: state.params.froude(),
        crest: state.crest(),
        flow_force_spread: spread(&flow_force_values),
        flow_force_values,
        trivial_flow_force: trivial_flow_force(state.params.gamma, state.params.alpha),
        phi_identity_residual: phi_surface_check(&fields, &surface_stations(op.basis()))?,
        integral_identity_residual: integral_identity_check(op, state)?,
        lopatinskii: op.lopatinskii_constant(state)?,
        complementing_identity: op.complementing_identity(state)?,
        monitor: op.monitor(state)?,
        nodal: nodal_check(op, state)?,
        overhang: reconstruct_surface(op, state, 2)?.overhang,
        stagnation_points: stagnation.points,
        critical_layers: stagnation.critical_layers,
        psi_bound_ok: psi_bound.holds,
        psi_bound,
        surface_dynamic_residual: dynamic,
        surface_kinematic_residual: kinematic,
    })
}
