use kinkwave::closed_form::CubicShape;
use kinkwave::output::{format_profile_csv, parse_profile_csv};
use kinkwave::profile::{closed_form_stress, integrate_on_grid, stress_grid};
use kinkwave::wave::{admissible_problem, wave_speed_squared};
use kinkwave::{
    existence_gate, integrate_profile, quadrature_profile, reduced_field, BoundaryStates, ClosedFormSolution,
    ConstitutiveModel, IntegratorConfig, ReducedField, SpeedSign, WaveProblem,
};
use proptest::prelude::*;

fn admissible_field(model: ConstitutiveModel, nu: f64) -> ReducedField {
    reduced_field(&admissible_problem(model, nu, BoundaryStates::normalized(), None).unwrap()).unwrap()
}

fn coarse(field: &ReducedField) -> IntegratorConfig {
    IntegratorConfig { samples: 401, ..IntegratorConfig::for_field(field).unwrap() }
}

fn quadratic_model() -> impl Strategy<Value = ConstitutiveModel> {
    (0.2f64..3.0, prop_oneof![-1.5f64..-0.05, 0.05f64..1.5])
        .prop_map(|(gp0, gpp0)| ConstitutiveModel::Quadratic { gp0, gpp0 })
        .prop_filter("g(1) > 0", |m| m.eval(1.0).unwrap() > 0.05)
}

/// Cubic laws with `b = 1 + 3g''(0)/g'''(0) > 0`.
fn cubic_model() -> impl Strategy<Value = ConstitutiveModel> {
    (0.2f64..3.0, 0.0f64..1.5, 0.1f64..2.0).prop_map(|(gp0, gpp0, gppp0)| ConstitutiveModel::Cubic { gp0, gpp0, gppp0 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn speed_times_jump_in_g_is_one(model in prop_oneof![quadratic_model(), cubic_model()]) {
        let c2 = wave_speed_squared(&model, &BoundaryStates::normalized()).unwrap();
        prop_assert!((c2 * model.eval(1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exactly_one_speed_sign_admits_the_wave(
        model in prop_oneof![quadratic_model(), cubic_model()],
        nu in 0.05f64..2.0,
    ) {
        let admitted = [SpeedSign::Positive, SpeedSign::Negative]
            .into_iter()
            .filter(|&s| existence_gate(&WaveProblem::normalized(model, nu, s).unwrap()).is_admissible())
            .count();
        prop_assert_eq!(admitted, 1);
    }

    #[test]
    fn quadratic_profiles_are_monotone_and_match_the_logistic(model in quadratic_model(), nu in 0.1f64..2.0) {
        let field = admissible_field(model, nu);
        let cfg = coarse(&field);
        let profile = integrate_profile(&field, &cfg).unwrap();
        prop_assert!(profile.check_invariants(cfg.equilibrium_cutoff).is_ok());
        let sol = ClosedFormSolution::for_field(&field).unwrap();
        for s in &profile.samples {
            let exact = closed_form_stress(&sol, &field.boundary, s.xi).unwrap();
            prop_assert!((exact - s.t).abs() < 1e-7, "xi {} ode {} exact {}", s.xi, s.t, exact);
        }
    }

    #[test]
    fn cubic_quadrature_matches_ode(model in cubic_model(), nu in 0.1f64..2.0) {
        let field = admissible_field(model, nu);
        let shape = CubicShape::from_field(&field).unwrap();
        prop_assert!(shape.rate < 0.0 && shape.b > 0.0);
        let quad = quadrature_profile(&field, &stress_grid(&field.boundary, 101)).unwrap();
        let xis: Vec<f64> = quad.samples.iter().map(|s| s.xi).collect();
        let ode = integrate_on_grid(&field, &coarse(&field), &xis).unwrap();
        for (q, o) in quad.samples.iter().zip(&ode) {
            prop_assert!((q.t - o.t).abs() < 1e-6, "xi {} quadrature {} ode {}", q.xi, q.t, o.t);
        }
    }

    #[test]
    fn width_is_linear_in_viscosity(nu in 0.05f64..3.0, name in prop::sample::select(vec!["quadratic", "modelB", "modelC", "modelD"])) {
        let model = ConstitutiveModel::catalog_default(name).unwrap();
        let d1 = admissible_field(model, nu).width().unwrap();
        let d2 = admissible_field(model, 2.0 * nu).width().unwrap();
        prop_assert!((d2 / d1 - 2.0).abs() < 1e-9);
    }

    #[test]
    fn swapped_states_keep_the_speed(model in quadratic_model(), lo in -0.5f64..0.0, hi in 0.5f64..1.0) {
        let b = BoundaryStates::new(hi, lo).unwrap();
        let c2 = wave_speed_squared(&model, &b).unwrap();
        let swapped = wave_speed_squared(&model, &b.swapped()).unwrap();
        prop_assert!((c2 - swapped).abs() <= 1e-12 * c2.abs());
    }
}

#[test]
fn tighter_tolerance_gives_smaller_error() {
    let field = admissible_field(ConstitutiveModel::catalog_default("quadratic").unwrap(), 0.5);
    let sol = ClosedFormSolution::for_field(&field).unwrap();
    let error = |tol: f64| {
        let cfg = IntegratorConfig { rel_tol: tol, abs_tol: tol, ..coarse(&field) };
        let p = integrate_profile(&field, &cfg).unwrap();
        p.samples
            .iter()
            .map(|s| (closed_form_stress(&sol, &field.boundary, s.xi).unwrap() - s.t).abs())
            .fold(0.0, f64::max)
    };
    // at loose tolerances the step cap, not the tolerance, sets the step
    let errors: Vec<f64> = [1e-4, 1e-6, 1e-8, 1e-10].into_iter().map(error).collect();
    assert!(errors.windows(2).all(|w| w[1] <= w[0]), "{errors:?}");
    assert!(errors[3] < 1e-3 * errors[0] && errors[3] < 1e-9, "{errors:?}");
}

#[test]
fn csv_round_trip_keeps_twelve_digits() {
    let field = admissible_field(ConstitutiveModel::catalog_default("modelC").unwrap(), 0.5);
    let profile = integrate_profile(&field, &coarse(&field)).unwrap();
    let parsed = parse_profile_csv(&format_profile_csv(&profile, None)).unwrap();
    assert_eq!(parsed.len(), profile.samples.len());
    for (a, b) in parsed.iter().zip(&profile.samples) {
        assert!((a.xi - b.xi).abs() <= 1e-12 * b.xi.abs().max(1.0));
        assert!((a.t - b.t).abs() <= 1e-11 * b.t.abs().max(1e-300));
    }
}

#[test]
fn linear_law_has_no_profile() {
    let linear = ConstitutiveModel::Linear { gp0: 2.0 };
    assert!(admissible_problem(linear, 0.5, BoundaryStates::normalized(), None).is_err());
}

#[test]
fn general_boundary_states_give_monotone_kinks() {
    let model = ConstitutiveModel::catalog_default("modelD").unwrap();
    for (tm, tp) in [(0.5, -0.25), (-0.2, 0.6)] {
        let b = BoundaryStates::new(tm, tp).unwrap();
        let field = reduced_field(&admissible_problem(model, 0.5, b, None).unwrap()).unwrap();
        let cfg = coarse(&field);
        let p = integrate_profile(&field, &cfg).unwrap();
        p.check_invariants(cfg.equilibrium_cutoff).unwrap();
        assert!((p.stress_at(0.0).unwrap() - b.midpoint()).abs() < 1e-12);
    }
}
