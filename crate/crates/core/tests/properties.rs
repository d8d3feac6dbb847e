use proptest::prelude::*;

use solwave::asymptotics::{explicit_homoclinic, nonlinear_coefficient, reduced_ode_energy};
use solwave::diagnostics::{conjugate_depth, qhat, shat, trivial_flow_force};
use solwave::io::{format_hex, parse_hex, SolutionFile};
use solwave::strip::dtn_apply;
use solwave::{
    dispersion_root, seed_profile, Collocation, DispersionRoot, ModeBasis, Parameters, ReducedState, SurfaceTrace,
    WaveOperator,
};

/// Coefficients decaying like `1/(1+n)²`, small enough to stay admissible.
fn decaying_coeffs(len: usize, scale: f64) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, len).prop_map(move |r| {
        r.iter()
            .enumerate()
            .map(|(n, v)| scale * v / (1.0 + n as f64).powi(2))
            .collect()
    })
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

proptest! {
    #[test]
    fn hex_floats_round_trip_bitwise(bits in any::<u64>()) {
        let x = f64::from_bits(bits);
        prop_assume!(x.is_finite());
        let text = format_hex(x).unwrap();
        prop_assert_eq!(parse_hex(&text).unwrap().to_bits(), bits);
    }

    #[test]
    fn solution_files_round_trip(coeffs in proptest::collection::vec(-1e3f64..1e3, 9), l in 1.0f64..100.0, g in -3.0f64..2.0, a in 1e-3f64..5.0) {
        let basis = ModeBasis::new(l, 8).unwrap();
        let state = ReducedState::new(basis, Parameters::new(g, a).unwrap(), SurfaceTrace::new(&basis, coeffs).unwrap()).unwrap();
        let json = serde_json::to_string(&SolutionFile::from_state(&state).unwrap()).unwrap();
        let back: SolutionFile = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.to_state().unwrap(), state);
    }

    #[test]
    fn dtn_is_linear(a in decaying_coeffs(17, 1.0), b in decaying_coeffs(17, 1.0), s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let basis = ModeBasis::new(7.5, 16).unwrap();
        let ta = SurfaceTrace::new(&basis, a).unwrap();
        let tb = SurfaceTrace::new(&basis, b).unwrap();
        let lhs = dtn_apply(&ta.scaled(s).plus(&tb.scaled(t)), &basis).unwrap();
        let rhs = dtn_apply(&ta, &basis).unwrap().scaled(s).plus(&dtn_apply(&tb, &basis).unwrap().scaled(t));
        for (x, y) in lhs.coeffs().iter().zip(rhs.coeffs()) {
            prop_assert!((x - y).abs() <= 1e-14 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn projection_inverts_synthesis(a in decaying_coeffs(33, 10.0), l in 0.5f64..200.0) {
        let colloc = Collocation::new(ModeBasis::new(l, 32).unwrap());
        let back = colloc.project(&colloc.synthesize(&a));
        let scale = sup(&a);
        for (x, y) in a.iter().zip(&back) {
            prop_assert!((x - y).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn trivial_flow_force_matches_closed_form(g in -3.0f64..2.0, a in 1e-3f64..5.0) {
        prop_assert!((shat(g, a, 1.0) - trivial_flow_force(g, a)).abs() <= 1e-13 * trivial_flow_force(g, a).abs().max(1.0));
    }

    #[test]
    fn dispersion_roots_solve_the_relation(g in -3.0f64..0.95, excess in 1e-3f64..5.0) {
        let alpha = 1.0 - g + excess;
        let k = dispersion_root(g, alpha).wavenumber().unwrap();
        prop_assert!((k / k.tanh() - (g + alpha)).abs() <= 1e-12 * (g + alpha));
        prop_assert_eq!(dispersion_root(g, (1.0 - g - excess).max(1e-6)), DispersionRoot::Absent);
    }

    #[test]
    fn conjugate_depth_solves_the_cubic(g in -3.0f64..0.95, frac in 0.05f64..0.95) {
        let alpha = frac * Parameters::critical_alpha(g);
        let d = conjugate_depth(g, alpha).unwrap();
        prop_assert!(d > 1.0);
        prop_assert!((qhat(g, alpha, d) - 1.0).abs() <= 1e-10);
        prop_assert!(shat(g, alpha, d) > shat(g, alpha, 1.0));
    }

    #[test]
    fn homoclinic_conserves_energy(g in -3.0f64..2.0, x in -8.0f64..8.0) {
        let p = explicit_homoclinic(g, x);
        prop_assert!(reduced_ode_energy(g, p.q, p.p).abs() <= 1e-13);
        prop_assert!(p.q > 0.0 && p.q <= 3.0 / nonlinear_coefficient(g) + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn seeds_are_even_elevation_waves(g in -2.0f64..0.9, eps in 0.005f64..0.1) {
        let basis = ModeBasis::new(64.0, 128).unwrap();
        let seed = seed_profile(g, eps, basis).unwrap();
        prop_assert!((seed.params.alpha - (1.0 - g - eps)).abs() < 1e-15);
        for &x in &[0.3, 2.0, 11.0, 40.0] {
            let a = seed.w1.value_at(&basis, x).unwrap();
            let b = seed.w1.value_at(&basis, -x).unwrap();
            prop_assert!((a - b).abs() <= 1e-15);
            prop_assert!(a > 0.0 && a < seed.crest());
        }
        let expected = 3.0 * eps / nonlinear_coefficient(g);
        prop_assert!((seed.crest() - expected).abs() <= 1e-3 * expected);
    }

    #[test]
    fn complementing_identity_holds_on_random_states(a in decaying_coeffs(17, 0.2), g in -2.0f64..1.0, alpha in 0.1f64..3.0) {
        let basis = ModeBasis::new(8.0, 16).unwrap();
        let op = WaveOperator::new(basis);
        let state = ReducedState::new(basis, Parameters::new(g, alpha).unwrap(), SurfaceTrace::new(&basis, a).unwrap()).unwrap();
        prop_assert!(op.complementing_identity(&state).unwrap().relative <= 1e-10);
    }

    #[test]
    fn jacobian_matches_finite_differences(a in decaying_coeffs(17, 0.2), g in -2.0f64..1.0, alpha in 0.1f64..3.0) {
        let basis = ModeBasis::new(8.0, 16).unwrap();
        let op = WaveOperator::new(basis);
        let state = ReducedState::new(basis, Parameters::new(g, alpha).unwrap(), SurfaceTrace::new(&basis, a).unwrap()).unwrap();
        prop_assume!(state.is_admissible(&op).unwrap());
        let jac = op.jacobian(&state).unwrap();
        let scale = jac.coeffs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let h = 1e-6;
        let mut worst = 0.0f64;
        for n in 0..basis.coefficient_count() {
            let mut plus = state.clone();
            plus.w1.coeffs_mut()[n] += h;
            let mut minus = state.clone();
            minus.w1.coeffs_mut()[n] -= h;
            let rp = op.residual(&plus).unwrap();
            let rm = op.residual(&minus).unwrap();
            for j in 0..rp.len() {
                worst = worst.max(((rp[j] - rm[j]) / (2.0 * h) - jac.coeffs[(j, n)]).abs());
            }
        }
        prop_assert!(worst / scale <= 1e-6, "scaled error {}", worst / scale);
    }
}
