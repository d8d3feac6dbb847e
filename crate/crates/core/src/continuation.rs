//! Newton's method on the projected equations and pseudo-arclength
//! continuation of the solitary-wave branch away from `α = 1 - γ`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::asymptotics::seed_profile;
use crate::error::{Error, Result};
use crate::operator::{Monitor, ReducedState, WaveOperator};
use crate::strip::ModeBasis;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewtonSettings {
    /// Convergence threshold on the sup-norm of the projected residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Backtracking factor applied when a step does not reduce the residual.
    pub damping: f64,
    pub max_backtracks: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 25,
            damping: 0.5,
            max_backtracks: 12,
        }
    }
}

/// Limits that end a branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Lower bound for the monitors `m1` and `m2`.
    pub monitor_min: f64,
    pub alpha_min: f64,
    pub froude_max: f64,
    /// Upper bound for `sup |∇w1|`, used in place of `m1` when `γ > 0`.
    pub gradient_max: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            monitor_min: 1e-2,
            alpha_min: 1e-3,
            froude_max: 1e3,
            gradient_max: 1e2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuationSettings {
    pub h0: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Weight of `α` relative to the coefficient vector in the arclength norm.
    pub alpha_weight: f64,
    /// Step growth factor after an easy corrector solve.
    pub growth: f64,
    /// Corrector iteration count at or below which the step grows.
    pub easy_iterations: usize,
    /// Largest admissible coefficient among the top fifth of the modes.
    pub tail_tol: f64,
    /// Truncation is doubled while the tail is too large, up to this many modes.
    pub max_mode_count: usize,
    pub thresholds: Thresholds,
}

impl Default for ContinuationSettings {
    fn default() -> Self {
        Self {
            h0: 0.02,
            h_min: 1e-8,
            h_max: 0.05,
            max_steps: 2000,
            alpha_weight: 10.0,
            growth: 1.5,
            easy_iterations: 4,
            tail_tol: 1e-13,
            max_mode_count: 1024,
            thresholds: Thresholds::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchConfig {
    pub gamma: f64,
    /// Distance `1 - γ - α` of the seed from the bifurcation point.
    pub eps0: f64,
    pub basis: ModeBasis,
    pub newton: NewtonSettings,
    pub continuation: ContinuationSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Sup-norm of the projected residual on the nodes.
    pub residual: f64,
}

/// Sign information for `∂x η` away from the crest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodalReport {
    /// `∂x η < 10⁻¹²` at every sampled point with `x > 0`.
    pub holds: bool,
    /// The profile is flat to rounding, so the property holds only trivially.
    pub trivial_flat: bool,
    /// Largest sampled value of `∂x η`.
    pub max_slope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MonitorKind {
    M1,
    M2,
    M3,
    Gradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    MonitorBlowup(MonitorKind),
    StepCollapse,
    MaxSteps,
    NewtonDivergence,
    /// `a22 = 2 ψ_y` changed sign on the surface.
    SignFlip,
    /// The coefficient tail stayed above tolerance at the largest truncation.
    ResolutionLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub step: usize,
    /// Accumulated arclength.
    pub s: f64,
    pub state: ReducedState,
    pub monitor: Monitor,
    pub lopatinskii: f64,
    pub newton: NewtonReport,
    pub nodal: NodalReport,
    /// Largest coefficient among the top fifth of the modes.
    pub tail: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StepOutcome {
    Accepted,
    /// The corrector failed and the step was halved.
    Rejected {
        reason: String,
    },
    /// Truncation was raised to this many modes and the step retried.
    Refined {
        mode_count: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepEvent {
    pub step: usize,
    pub h: f64,
    pub outcome: StepOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
    pub termination: Termination,
    pub events: Vec<StepEvent>,
}

fn sup(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn projected_sup(op: &WaveOperator, projected: &[f64]) -> f64 {
    sup(&op.collocation().synthesize(projected))
}

fn lu_solve(matrix: DMatrix<f64>, rhs: DVector<f64>) -> Result<DVector<f64>> {
    let x = matrix.lu().solve(&rhs).ok_or(Error::SingularJacobian)?;
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::SingularJacobian)
    }
}

/// Newton's method at fixed `α` on the projected system, with backtracking.
pub fn newton_solve(
    op: &WaveOperator,
    initial: &ReducedState,
    settings: &NewtonSettings,
) -> Result<(ReducedState, NewtonReport)> {
    let mut state = initial.clone();
    let mut r = op.projected_residual(&state)?;
    let mut norm = projected_sup(op, &r);
    for iteration in 0..=settings.max_iter {
        if norm <= settings.tol {
            return Ok((
                state,
                NewtonReport {
                    iterations: iteration,
                    residual: norm,
                },
            ));
        }
        if iteration == settings.max_iter {
            break;
        }
        let jac = op.jacobian(&state)?;
        let pj = op.collocation().analysis() * &jac.coeffs;
        let delta = lu_solve(pj, -DVector::from_vec(r.clone()))?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=settings.max_backtracks {
            let mut trial = state.clone();
            for (c, d) in trial.w1.coeffs_mut().iter_mut().zip(delta.iter()) {
                *c += lambda * d;
            }
            let tr = op.projected_residual(&trial)?;
            let tn = projected_sup(op, &tr);
            if tn < norm {
                state = trial;
                r = tr;
                norm = tn;
                accepted = true;
                break;
            }
            lambda *= settings.damping;
        }
        if !accepted {
            return Err(Error::NewtonDivergence {
                iterations: iteration + 1,
                residual: norm,
            });
        }
    }
    Err(Error::NewtonStalled {
        iterations: settings.max_iter,
        residual: norm,
    })
}

/// Unit tangent in the weighted norm `‖(a, α)‖² = |a|² + w² α²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub coeffs: Vec<f64>,
    pub alpha: f64,
}

impl Tangent {
    fn normalised(coeffs: Vec<f64>, alpha: f64, weight: f64) -> Self {
        let norm = (coeffs.iter().map(|c| c * c).sum::<f64>() + (weight * alpha).powi(2)).sqrt();
        Self {
            coeffs: coeffs.into_iter().map(|c| c / norm).collect(),
            alpha: alpha / norm,
        }
    }

    fn resized(&self, len: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len, 0.0);
        Self {
            coeffs,
            alpha: self.alpha,
        }
    }
}

/// Weighted distance between two states, zero-padding the shorter.
pub fn weighted_distance(a: &ReducedState, b: &ReducedState, alpha_weight: f64) -> f64 {
    let (ca, cb) = (a.w1.coeffs(), b.w1.coeffs());
    let len = ca.len().max(cb.len());
    let coeff: f64 = (0..len)
        .map(|n| (ca.get(n).unwrap_or(&0.0) - cb.get(n).unwrap_or(&0.0)).powi(2))
        .sum();
    (coeff + (alpha_weight * (a.params.alpha - b.params.alpha)).powi(2)).sqrt()
}

/// Secant predictor `current + h (current - previous) / ‖current - previous‖`.
pub fn arclength_step(current: &ReducedState, previous: &ReducedState, h: f64, alpha_weight: f64) -> ReducedState {
    let t = secant(current, previous, alpha_weight);
    predict(current, &t, h)
}

fn secant(current: &ReducedState, previous: &ReducedState, alpha_weight: f64) -> Tangent {
    let prev = previous.w1.resized(&current.basis);
    let coeffs = current
        .w1
        .coeffs()
        .iter()
        .zip(prev.coeffs())
        .map(|(c, p)| c - p)
        .collect();
    Tangent::normalised(coeffs, current.params.alpha - previous.params.alpha, alpha_weight)
}

fn predict(current: &ReducedState, t: &Tangent, h: f64) -> ReducedState {
    let mut out = current.clone();
    for (c, d) in out.w1.coeffs_mut().iter_mut().zip(&t.coeffs) {
        *c += h * d;
    }
    out.params.alpha += h * t.alpha;
    out
}

/// Tangent at a regular solution, oriented so that `α` decreases.
pub fn initial_tangent(op: &WaveOperator, state: &ReducedState, alpha_weight: f64) -> Result<Tangent> {
    let jac = op.jacobian(state)?;
    let p = op.collocation().analysis();
    let pj = p * &jac.coeffs;
    let pja = p * DVector::from_vec(jac.alpha);
    let v = lu_solve(pj, -pja)?;
    let t = Tangent::normalised(v.iter().copied().collect(), 1.0, alpha_weight);
    Ok(Tangent {
        coeffs: t.coeffs.iter().map(|c| -c).collect(),
        alpha: -t.alpha,
    })
}

/// Newton on the projected equations bordered by `⟨z - anchor, t⟩_w = h`.
fn bordered_correct(
    op: &WaveOperator,
    anchor: &ReducedState,
    t: &Tangent,
    h: f64,
    start: ReducedState,
    settings: &NewtonSettings,
    alpha_weight: f64,
) -> Result<(ReducedState, NewtonReport)> {
    let w2 = alpha_weight * alpha_weight;
    let constraint = |z: &ReducedState| -> f64 {
        let c: f64 =
            z.w1.coeffs()
                .iter()
                .zip(anchor.w1.coeffs())
                .zip(&t.coeffs)
                .map(|((a, b), ti)| (a - b) * ti)
                .sum();
        c + w2 * (z.params.alpha - anchor.params.alpha) * t.alpha - h
    };
    let merit = |z: &ReducedState| -> Result<(Vec<f64>, f64, f64)> {
        if z.params.alpha.is_nan() || z.params.alpha <= 0.0 {
            return Ok((Vec::new(), 0.0, f64::INFINITY));
        }
        let r = op.projected_residual(z)?;
        let g = constraint(z);
        let m = projected_sup(op, &r).max(g.abs());
        Ok((r, g, m))
    };
    let mut state = start;
    let (mut r, mut g, mut norm) = merit(&state)?;
    if !norm.is_finite() {
        return Err(Error::NewtonDivergence {
            iterations: 0,
            residual: norm,
        });
    }
    let len = op.basis().coefficient_count();
    for iteration in 0..=settings.max_iter {
        if norm <= settings.tol {
            return Ok((
                state,
                NewtonReport {
                    iterations: iteration,
                    residual: norm,
                },
            ));
        }
        if iteration == settings.max_iter {
            break;
        }
        let jac = op.jacobian(&state)?;
        let p = op.collocation().analysis();
        let pj = p * &jac.coeffs;
        let pja = p * DVector::from_vec(jac.alpha);
        let mut big = DMatrix::zeros(len + 1, len + 1);
        big.view_mut((0, 0), (len, len)).copy_from(&pj);
        big.view_mut((0, len), (len, 1)).copy_from(&pja);
        for n in 0..len {
            big[(len, n)] = t.coeffs[n];
        }
        big[(len, len)] = w2 * t.alpha;
        let mut rhs = DVector::zeros(len + 1);
        for n in 0..len {
            rhs[n] = -r[n];
        }
        rhs[len] = -g;
        let delta = lu_solve(big, rhs)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=settings.max_backtracks {
            let mut trial = state.clone();
            for (c, d) in trial.w1.coeffs_mut().iter_mut().zip(delta.iter()) {
                *c += lambda * d;
            }
            trial.params.alpha += lambda * delta[len];
            let (tr, tg, tn) = merit(&trial)?;
            if tn < norm {
                state = trial;
                (r, g, norm) = (tr, tg, tn);
                accepted = true;
                break;
            }
            lambda *= settings.damping;
        }
        if !accepted {
            return Err(Error::NewtonDivergence {
                iterations: iteration + 1,
                residual: norm,
            });
        }
    }
    Err(Error::NewtonStalled {
        iterations: settings.max_iter,
        residual: norm,
    })
}

/// Samples `∂x η` on the surface nodes and on interior rows `y = 0.1, …, 0.9`.
pub fn nodal_check(op: &WaveOperator, state: &ReducedState) -> Result<NodalReport> {
    let c = op.collocation();
    let a = state.w1.coeffs();
    op.basis().check(a)?;
    let ks = op.basis().wavenumbers();
    let mut max_slope = f64::NEG_INFINITY;
    let mut max_abs: f64 = 0.0;
    for level in 1..=10 {
        let y = level as f64 / 10.0;
        let scaled: Vec<f64> = a
            .iter()
            .zip(&ks)
            .map(|(an, &k)| an * crate::strip::sinh_ratio(k, y))
            .collect();
        for v in c.synthesize_dx(&scaled) {
            max_slope = max_slope.max(v);
            max_abs = max_abs.max(v.abs());
        }
    }
    Ok(NodalReport {
        holds: max_slope < 1e-12,
        trivial_flat: max_abs < 1e-14,
        max_slope,
    })
}

/// Largest coefficient magnitude among the top fifth of the modes.
pub fn coefficient_tail(state: &ReducedState) -> f64 {
    let a = state.w1.coeffs();
    let start = a.len() - a.len().div_ceil(5);
    sup(&a[start..])
}

/// Stateful branch tracer; [`run_branch`] drives it to termination.
pub struct BranchTracer {
    config: BranchConfig,
    op: WaveOperator,
    points: Vec<BranchPoint>,
    events: Vec<StepEvent>,
    tangent: Tangent,
    h: f64,
}

impl BranchTracer {
    /// Solves for the seed at `α = 1 - γ - ε0`.
    pub fn from_seed(config: BranchConfig) -> Result<Self> {
        let op = WaveOperator::new(config.basis);
        let seed = seed_profile(config.gamma, config.eps0, config.basis)?;
        let (state, newton) = newton_solve(&op, &seed, &config.newton)?;
        let tangent = initial_tangent(&op, &state, config.continuation.alpha_weight)?;
        let point = make_point(&op, 0, 0.0, state, newton)?;
        Ok(Self {
            h: config.continuation.h0,
            config,
            op,
            points: vec![point],
            events: Vec::new(),
            tangent,
        })
    }

    pub fn config(&self) -> &BranchConfig {
        &self.config
    }

    pub fn config_mut(&mut self) -> &mut BranchConfig {
        &mut self.config
    }

    pub fn points(&self) -> &[BranchPoint] {
        &self.points
    }

    pub fn events(&self) -> &[StepEvent] {
        &self.events
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    pub fn operator(&self) -> &WaveOperator {
        &self.op
    }

    fn termination_for(&self, point: &BranchPoint) -> Option<Termination> {
        let th = &self.config.continuation.thresholds;
        let m = &point.monitor;
        let gamma = self.config.gamma;
        if gamma > 0.0 {
            if m.gradient_sup > th.gradient_max {
                return Some(Termination::MonitorBlowup(MonitorKind::Gradient));
            }
        } else if m.m1 < th.monitor_min {
            return Some(Termination::MonitorBlowup(MonitorKind::M1));
        }
        if m.m2 < th.monitor_min {
            return Some(Termination::MonitorBlowup(MonitorKind::M2));
        }
        if point.state.params.alpha < th.alpha_min || m.m3 > th.froude_max {
            return Some(Termination::MonitorBlowup(MonitorKind::M3));
        }
        None
    }

    fn refine(&mut self) -> Result<()> {
        let basis = self.op.basis().with_mode_count(2 * self.op.basis().mode_count())?;
        self.op = WaveOperator::new(basis);
        self.tangent = self.tangent.resized(basis.coefficient_count());
        Ok(())
    }

    /// Attempts one step. `Ok(None)` means a point was accepted.
    pub fn advance(&mut self) -> Result<Option<Termination>> {
        let settings = self.config.continuation;
        let step = self.points.len();
        loop {
            let current = self
                .points
                .last()
                .expect("branch has a seed")
                .state
                .with_basis(*self.op.basis());
            let guess = predict(&current, &self.tangent, self.h);
            let attempt = bordered_correct(
                &self.op,
                &current,
                &self.tangent,
                self.h,
                guess,
                &self.config.newton,
                settings.alpha_weight,
            );
            let (state, newton) = match attempt {
                Ok(v) => v,
                Err(e @ (Error::NewtonDivergence { .. } | Error::NewtonStalled { .. } | Error::SingularJacobian)) => {
                    self.events.push(StepEvent {
                        step,
                        h: self.h,
                        outcome: StepOutcome::Rejected { reason: e.to_string() },
                    });
                    self.h *= 0.5;
                    if self.h < settings.h_min {
                        return Ok(Some(if matches!(e, Error::NewtonDivergence { .. }) {
                            Termination::NewtonDivergence
                        } else {
                            Termination::StepCollapse
                        }));
                    }
                    continue;
                }
                Err(e) => return Err(e),
            };
            let tail = coefficient_tail(&state);
            if tail > settings.tail_tol {
                if self.op.basis().mode_count() * 2 <= settings.max_mode_count {
                    self.refine()?;
                    self.events.push(StepEvent {
                        step,
                        h: self.h,
                        outcome: StepOutcome::Refined {
                            mode_count: self.op.basis().mode_count(),
                        },
                    });
                    continue;
                }
                return Ok(Some(Termination::ResolutionLimit));
            }
            let coeffs = self.op.coefficients(&state)?;
            if coeffs.a22.iter().any(|&v| v <= 0.0) {
                return Ok(Some(Termination::SignFlip));
            }
            let s = self.points.last().map_or(0.0, |p| p.s) + self.h;
            let point = make_point(&self.op, step, s, state, newton)?;
            if step > 5 && sup(point.state.w1.coeffs()) < 1e-8 {
                return Err(Error::CollapsedToTrivial { step });
            }
            self.tangent = secant(&point.state, &current, settings.alpha_weight);
            self.events.push(StepEvent {
                step,
                h: self.h,
                outcome: StepOutcome::Accepted,
            });
            let termination = self.termination_for(&point);
            self.points.push(point);
            if newton.iterations <= settings.easy_iterations {
                self.h = (self.h * settings.growth).min(settings.h_max);
            }
            return Ok(termination);
        }
    }

    pub fn finish(self, termination: Termination) -> Branch {
        Branch {
            points: self.points,
            termination,
            events: self.events,
        }
    }
}

fn make_point(
    op: &WaveOperator,
    step: usize,
    s: f64,
    state: ReducedState,
    newton: NewtonReport,
) -> Result<BranchPoint> {
    Ok(BranchPoint {
        step,
        s,
        monitor: op.monitor(&state)?,
        lopatinskii: op.lopatinskii_constant(&state)?,
        nodal: nodal_check(op, &state)?,
        tail: coefficient_tail(&state),
        newton,
        state,
    })
}

/// Seeds near the bifurcation point and continues until a termination
/// condition fires. `on_point` sees every accepted point, seed included.
pub fn run_branch_with(config: BranchConfig, mut on_point: impl FnMut(&BranchPoint)) -> Result<Branch> {
    let mut tracer = BranchTracer::from_seed(config)?;
    on_point(&tracer.points[0]);
    for _ in 0..config.continuation.max_steps {
        let before = tracer.points.len();
        let outcome = tracer.advance()?;
        if tracer.points.len() > before {
            on_point(tracer.points.last().expect("point was pushed"));
        }
        if let Some(termination) = outcome {
            return Ok(tracer.finish(termination));
        }
    }
    Ok(tracer.finish(Termination::MaxSteps))
}

pub fn run_branch(config: BranchConfig) -> Result<Branch> {
    run_branch_with(config, |_| {})
}
