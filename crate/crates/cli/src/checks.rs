//! The pass/fail table printed by `solwave invariants`.

use solwave::{diagnose, DiagnosticsReport, Parameters, ReducedState, Result, WaveOperator};

/// Amplitude below which a state counts as the uniform flow.
const TRIVIAL_AMPLITUDE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    /// Human-readable acceptance condition.
    pub condition: String,
    pub pass: bool,
}

fn check(name: &'static str, value: f64, condition: String, pass: bool) -> Check {
    Check {
        name,
        value,
        condition,
        pass,
    }
}

fn at_most(name: &'static str, value: f64, limit: f64) -> Check {
    check(name, value, format!("<= {limit:e}"), value <= limit)
}

pub fn run_checks(op: &WaveOperator, state: &ReducedState) -> Result<(Vec<Check>, DiagnosticsReport)> {
    let report = diagnose(op, state)?;
    let residual = op
        .collocation()
        .synthesize(&op.projected_residual(state)?)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let fields = op.fields(state)?;
    let w1_min = fields
        .w1
        .iter()
        .copied()
        .chain([state.crest(), state.edge()])
        .fold(f64::INFINITY, f64::min);
    let amplitude = state.w1.coeffs().iter().map(|a| a.abs()).sum::<f64>();
    let s_scale = report.flow_force_values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let s_far = *report.flow_force_values.last().expect("flow force has stations");
    let alpha_cr = Parameters::critical_alpha(state.params.gamma);
    let trivial = amplitude < TRIVIAL_AMPLITUDE;

    let checks = vec![
        at_most("residual", residual, 1e-9),
        at_most("flow_force_spread", report.flow_force_spread / s_scale, 1e-8),
        at_most(
            "flow_force_vs_uniform",
            (s_far - report.trivial_flow_force).abs() / report.trivial_flow_force.abs(),
            1e-8,
        ),
        at_most("phi_identity", report.phi_identity_residual, 1e-6),
        at_most("integral_identity", report.integral_identity_residual, 1e-6),
        at_most("complementing_identity", report.complementing_identity.relative, 1e-10),
        at_most("surface_bernoulli", report.surface_dynamic_residual, 1e-6),
        at_most("surface_tangency", report.surface_kinematic_residual, 1e-6),
        check(
            "lopatinskii",
            report.lopatinskii,
            "> 0".into(),
            report.lopatinskii > 0.0,
        ),
        check(
            "supercritical",
            state.params.alpha,
            if trivial {
                "any (uniform flow)".into()
            } else {
                format!("< {alpha_cr}")
            },
            trivial || state.params.alpha < alpha_cr,
        ),
        check("elevation", w1_min, ">= -1e-8".into(), w1_min >= -1e-8),
        check(
            "nodal",
            report.nodal.max_slope,
            "eta_x < 1e-12 for x > 0".into(),
            report.nodal.holds,
        ),
        check(
            "psi_bound",
            report.psi_bound.extreme,
            if state.params.gamma < 0.0 {
                format!("< {}", report.psi_bound.bound)
            } else {
                format!("> {}", report.psi_bound.bound)
            },
            report.psi_bound.holds,
        ),
        check(
            "admissible",
            f64::from(u8::from(state.is_admissible(op)?)),
            "1 + w1 > 0 and 1 + w1_y > 0".into(),
            state.is_admissible(op)?,
        ),
    ];
    Ok((checks, report))
}

pub fn format_table(checks: &[Check]) -> String {
    let mut out = format!("{:<24} {:>14}  {:<28} {}\n", "check", "value", "condition", "result");
    for c in checks {
        out.push_str(&format!(
            "{:<24} {:>14.6e}  {:<28} {}\n",
            c.name,
            c.value,
            c.condition,
            if c.pass { "PASS" } else { "FAIL" }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use solwave::ModeBasis;

    #[test]
    fn uniform_flow_passes_everything() {
        let basis = ModeBasis::new(16.0, 32).unwrap();
        let op = WaveOperator::new(basis);
        for (g, a) in [(0.0, 0.5), (-1.0, 2.5), (0.5, 0.7)] {
            let state = ReducedState::trivial(basis, Parameters::new(g, a).unwrap());
            let (checks, _) = run_checks(&op, &state).unwrap();
            for c in &checks {
                assert!(c.pass, "{g} {a}: {c:?}");
            }
        }
    }
}
