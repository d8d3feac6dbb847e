use std::fs;
use std::path::Path;

use serde::Serialize;
use solwave::asymptotics::{explicit_homoclinic, integrate_reduced_ode, nonlinear_coefficient, origin_eigenvalues};
use solwave::continuation::BranchTracer;
use solwave::diagnostics::{
    conjugate_depth, critical_depth, physical_point, qhat, shat, stagnation_scan, velocity, SolutionFields,
};
use solwave::io::write_atomic;
use solwave::{
    diagnose, dispersion_root, read_solution, write_solution, BranchPoint, DiagnosticsReport, DispersionRoot,
    Parameters, ReducedState, Termination, WaveOperator,
};

use crate::checks::{format_table, run_checks};
use crate::config::RunConfig;
use crate::{Failure, EXIT_CANT_CREATE, EXIT_NO_INPUT, EXIT_SOLVER, EXIT_USAGE};

fn solver(e: impl std::fmt::Display) -> Failure {
    Failure::new(EXIT_SOLVER, e)
}

fn output(e: impl std::fmt::Display) -> Failure {
    Failure::new(EXIT_CANT_CREATE, e)
}

fn read_state(path: &Path) -> Result<ReducedState, Failure> {
    read_solution(path).map_err(|e| Failure::new(EXIT_NO_INPUT, format!("cannot read {}: {e}", path.display())))
}

/// One row of branch.csv; the field order is the column order.
#[derive(Debug, Serialize)]
struct BranchRow {
    step: usize,
    s: f64,
    alpha: f64,
    #[serde(rename = "F")]
    froude: f64,
    crest_w1: f64,
    m1: f64,
    m2: f64,
    m3: f64,
    lopatinskii: f64,
    flow_force: f64,
    newton_iters: usize,
    nodal: bool,
    overhang: bool,
}

#[derive(Debug, Serialize)]
struct DiagnosticsRecord<'a> {
    step: usize,
    s: f64,
    mode_count: usize,
    #[serde(flatten)]
    report: &'a DiagnosticsReport,
}

#[derive(Debug, Serialize)]
struct RunSummary<'a> {
    termination: Option<Termination>,
    error: Option<String>,
    points: usize,
    events: &'a [solwave::continuation::StepEvent],
}

/// Accumulates the branch outputs and rewrites them after every point.
struct BranchWriter<'a> {
    dir: &'a Path,
    csv: csv::Writer<Vec<u8>>,
    ndjson: Vec<u8>,
}

impl<'a> BranchWriter<'a> {
    fn new(dir: &'a Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir.join("solutions")).map_err(|e| output(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir,
            csv: csv::Writer::from_writer(Vec::new()),
            ndjson: Vec::new(),
        })
    }

    fn record(&mut self, op: &WaveOperator, point: &BranchPoint) -> Result<(), Failure> {
        let report = diagnose(op, &point.state).map_err(solver)?;
        let m = &point.monitor;
        self.csv
            .serialize(BranchRow {
                step: point.step,
                s: point.s,
                alpha: point.state.params.alpha,
                froude: point.state.params.froude(),
                crest_w1: point.state.crest(),
                m1: m.m1,
                m2: m.m2,
                m3: m.m3,
                lopatinskii: point.lopatinskii,
                flow_force: report.flow_force_values[0],
                newton_iters: point.newton.iterations,
                nodal: point.nodal.holds,
                overhang: report.overhang,
            })
            .map_err(output)?;
        self.csv.flush().map_err(output)?;
        let record = DiagnosticsRecord {
            step: point.step,
            s: point.s,
            mode_count: point.state.basis.mode_count(),
            report: &report,
        };
        serde_json::to_writer(&mut self.ndjson, &record).map_err(output)?;
        self.ndjson.push(b'\n');

        let solution = self.dir.join("solutions").join(format!("step_{:05}.json", point.step));
        write_solution(&solution, &point.state).map_err(output)?;
        write_atomic(&self.dir.join("branch.csv"), self.csv.get_ref()).map_err(output)?;
        write_atomic(&self.dir.join("diagnostics.ndjson"), &self.ndjson).map_err(output)?;
        Ok(())
    }

    fn summary(&self, summary: &RunSummary) -> Result<(), Failure> {
        let mut text = serde_json::to_vec_pretty(summary).map_err(output)?;
        text.push(b'\n');
        write_atomic(&self.dir.join("summary.json"), &text).map_err(output)
    }
}

/// Monitor blowups, the step limit and the resolution limit are normal ends
/// of a run; the remaining terminations mean the solver gave up.
fn termination_code(t: Termination) -> u8 {
    match t {
        Termination::MonitorBlowup(_) | Termination::MaxSteps | Termination::ResolutionLimit => 0,
        Termination::StepCollapse | Termination::NewtonDivergence | Termination::SignFlip => EXIT_SOLVER,
    }
}

pub fn continue_branch(config: &RunConfig) -> Result<u8, Failure> {
    let branch_config = config.branch_config()?;
    let mut tracer = BranchTracer::from_seed(branch_config).map_err(|e| solver(format!("seed failed: {e}")))?;
    let mut writer = BranchWriter::new(&config.output_dir)?;
    let report = |p: &BranchPoint| {
        eprintln!(
            "step {:5}  alpha {:.8}  crest {:.6e}  m1 {:.4e}  N {}",
            p.step,
            p.state.params.alpha,
            p.state.crest(),
            p.monitor.m1,
            p.state.basis.mode_count()
        );
    };
    let seed = tracer.points()[0].clone();
    report(&seed);
    writer.record(tracer.operator(), &seed)?;

    let mut termination = Termination::MaxSteps;
    let mut error = None;
    for _ in 0..config.continuation.max_steps {
        let before = tracer.points().len();
        let outcome = tracer.advance();
        if tracer.points().len() > before {
            let point = tracer.points().last().expect("point was accepted").clone();
            report(&point);
            writer.record(tracer.operator(), &point)?;
        }
        match outcome {
            Ok(None) => {}
            Ok(Some(t)) => {
                termination = t;
                break;
            }
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        }
    }
    writer.summary(&RunSummary {
        termination: error.is_none().then_some(termination),
        error: error.clone(),
        points: tracer.points().len(),
        events: tracer.events(),
    })?;
    match error {
        Some(e) => Err(solver(format!("continuation failed: {e}"))),
        None => {
            println!("termination: {termination:?} after {} points", tracer.points().len());
            Ok(termination_code(termination))
        }
    }
}

pub fn invariants(path: &Path) -> Result<u8, Failure> {
    let state = read_state(path)?;
    let op = WaveOperator::new(state.basis);
    let (checks, _) = run_checks(&op, &state).map_err(solver)?;
    print!("{}", format_table(&checks));
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    Ok(if failed == 0 { 0 } else { 1 })
}

pub fn conjugate(gamma: f64, alpha: f64, samples: usize) -> Result<u8, Failure> {
    Parameters::new(gamma, alpha).map_err(|e| Failure::new(EXIT_USAGE, e))?;
    let alpha_cr = Parameters::critical_alpha(gamma);
    let d_cr = critical_depth(gamma, alpha).map_err(solver)?;
    println!("gamma {gamma}  alpha {alpha}  alpha_cr {alpha_cr}");
    println!("d_cr {d_cr:.15}");
    let d_star = match conjugate_depth(gamma, alpha) {
        Ok(d) => {
            println!("d_* {d:.15}");
            Some(d)
        }
        Err(e) => {
            println!("d_* none ({e})");
            None
        }
    };
    let hi = d_star.map_or(2.0 * d_cr.max(1.0), |d| 1.25 * d.max(1.0));
    println!("{:>12} {:>22} {:>22}", "d", "Q(d)", "S(d)");
    let samples = samples.max(2);
    for i in 0..samples {
        let d = hi * (i + 1) as f64 / samples as f64;
        println!(
            "{d:>12.6} {:>22.15e} {:>22.15e}",
            qhat(gamma, alpha, d),
            shat(gamma, alpha, d)
        );
    }
    if alpha >= alpha_cr {
        println!("status: degenerate (alpha >= alpha_cr, no solitary waves of elevation)");
        return Ok(0);
    }
    let d = d_star.expect("a conjugate depth exists below alpha_cr");
    let gap = shat(gamma, alpha, d) - shat(gamma, alpha, 1.0);
    println!("S(d_*) - S(1) = {gap:.6e}  {}", if gap > 0.0 { "PASS" } else { "FAIL" });
    Ok(if gap > 0.0 { 0 } else { 1 })
}

pub fn dispersion(gamma: f64, alpha: f64) -> Result<u8, Failure> {
    Parameters::new(gamma, alpha).map_err(|e| Failure::new(EXIT_USAGE, e))?;
    match dispersion_root(gamma, alpha) {
        DispersionRoot::Wavenumber(k) => println!("k {k:.17}"),
        DispersionRoot::Critical => println!("k 0 (critical: gamma + alpha = 1)"),
        DispersionRoot::Absent => println!("none (gamma + alpha < 1)"),
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
struct OdeRow {
    #[serde(rename = "X")]
    x: f64,
    #[serde(rename = "Q")]
    q: f64,
    #[serde(rename = "P")]
    p: f64,
}

pub fn reduced_ode(config: &RunConfig, span: f64, step: f64) -> Result<u8, Failure> {
    if !(span > 0.0 && step > 0.0 && step < span) {
        return Err(Failure::new(EXIT_USAGE, "need 0 < step < span"));
    }
    let gamma = config.gamma;
    let start = explicit_homoclinic(gamma, -span);
    let path = integrate_reduced_ode(gamma, start, span, step).map_err(solver)?;
    let mut csv = csv::Writer::from_writer(Vec::new());
    for p in &path {
        csv.serialize(OdeRow { x: p.x, q: p.q, p: p.p }).map_err(output)?;
    }
    csv.flush().map_err(output)?;
    fs::create_dir_all(&config.output_dir).map_err(output)?;
    let file = config.output_dir.join("reduced_ode.csv");
    write_atomic(&file, csv.get_ref()).map_err(output)?;

    let q0 = 3.0 / nonlinear_coefficient(gamma);
    let closest = path
        .iter()
        .map(|p| ((p.q - q0).powi(2) + p.p * p.p).sqrt())
        .fold(f64::INFINITY, f64::min);
    let (lo, hi) = origin_eigenvalues(gamma);
    println!("turning point (Q0, 0) = ({q0:.15}, 0); closest sample at distance {closest:.3e}");
    println!("origin eigenvalues {lo:.12} {hi:.12}");
    println!("wrote {} samples to {}", path.len(), file.display());
    Ok(0)
}

#[derive(Debug, Serialize)]
struct ProfileRow {
    kind: &'static str,
    x: f64,
    y: f64,
    #[serde(rename = "X")]
    big_x: f64,
    #[serde(rename = "Y")]
    big_y: f64,
    u: f64,
    v: f64,
}

pub fn profile(config: &RunConfig, path: &Path, samples: usize, nx: usize, ny: usize) -> Result<u8, Failure> {
    let state = read_state(path)?;
    let op = WaveOperator::new(state.basis);
    let fields = SolutionFields::new(&op, &state).map_err(solver)?;
    let l = state.basis.half_period();
    let grid = |count: usize, lo: f64, hi: f64| -> Vec<f64> {
        let count = count.max(2);
        (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect()
    };

    let mut csv = csv::Writer::from_writer(Vec::new());
    let mut row = |kind: &'static str, x: f64, y: f64| -> Result<(), Failure> {
        let [big_x, big_y] = physical_point(&fields, x, y).map_err(solver)?;
        let (u, v) = velocity(&fields, x, y).map_err(solver)?;
        csv.serialize(ProfileRow {
            kind,
            x,
            y,
            big_x,
            big_y,
            u,
            v,
        })
        .map_err(output)
    };
    let mut crest = (f64::NAN, f64::NEG_INFINITY);
    for x in grid(samples, -l, l) {
        row("surface", x, 1.0)?;
        let [big_x, big_y] = physical_point(&fields, x, 1.0).map_err(solver)?;
        if big_y > crest.1 {
            crest = (big_x, big_y);
        }
    }
    for y in grid(ny, 0.0, 1.0) {
        for x in grid(nx, -l, l) {
            row("interior", x, y)?;
        }
    }
    csv.flush().map_err(output)?;
    fs::create_dir_all(&config.output_dir).map_err(output)?;
    let file = config.output_dir.join("profile.csv");
    write_atomic(&file, csv.get_ref()).map_err(output)?;

    let surface = solwave::diagnostics::reconstruct_surface(&op, &state, samples).map_err(solver)?;
    let stagnation = stagnation_scan(&fields, 129, 33).map_err(solver)?;
    println!("highest surface point X {:.6e} Y {:.15}", crest.0, crest.1);
    println!("overhang {}", surface.overhang);
    println!("stagnation points {}", stagnation.points.len());
    for p in &stagnation.points {
        println!("  x {:.6} y {:.6} |u|^2+|v|^2 {:.3e}", p.x, p.y, p.speed_squared);
    }
    println!("critical layer crossings {}", stagnation.critical_layers.len());
    println!("wrote {}", file.display());
    Ok(0)
}
