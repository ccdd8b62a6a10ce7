use dissipaq_core::classical::*;
use dissipaq_core::phase::*;
use dissipaq_core::Complex64;
use proptest::prelude::*;

fn z_of(s: &PhaseState, sys: &SystemSpec, j: &ComplexStructure) -> Complex64 {
    to_complex(s, sys, j).unwrap().z[0]
}

/// Largest |z_rk4(t) − e^{(−γ+iω₁)t} z₀| over the run.
fn dsho_error(step: f64, method: Integrator) -> f64 {
    let (omega, gamma) = (1.0, 0.1);
    let sys = SystemSpec::dsho(omega, gamma).unwrap();
    let j = ComplexStructure::new((omega * omega - gamma * gamma as f64).sqrt(), 1).unwrap();
    let s0 = PhaseState::point(1.0, 0.3);
    let z0 = z_of(&s0, &sys, &j);
    let tr = integrate(&sys, &s0, step, 10.0, method).unwrap();
    tr.samples
        .iter()
        .map(|s| (z_of(s, &sys, &j) - dsho_exact(omega, gamma, z0, s.t).unwrap()).norm())
        .fold(0.0, f64::max)
}

fn log_log_slope(steps: &[f64], errs: &[f64]) -> f64 {
    let n = steps.len() as f64;
    let xs: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[test]
fn rk4_matches_exact_solution() {
    let err = dsho_error(1e-3, Integrator::Rk4);
    assert!(err <= 1e-8, "max |Δz| = {err:e}");
}

#[test]
fn rk4_is_fourth_order() {
    let steps = [0.2, 0.1, 0.05, 0.025];
    let errs: Vec<f64> = steps
        .iter()
        .map(|&h| dsho_error(h, Integrator::Rk4))
        .collect();
    let slope = log_log_slope(&steps, &errs);
    assert!((slope - 4.0).abs() <= 0.2, "slope {slope}, errors {errs:?}");
}

#[test]
fn split_is_second_order_on_dsho() {
    let steps = [0.1, 0.05, 0.025, 0.0125];
    let errs: Vec<f64> = steps
        .iter()
        .map(|&h| dsho_error(h, Integrator::Split))
        .collect();
    let slope = log_log_slope(&steps, &errs);
    assert!((slope - 2.0).abs() <= 0.2, "slope {slope}, errors {errs:?}");
}

#[test]
fn split_energy_bounded_without_friction() {
    let sys = SystemSpec::dsho(1.0, 0.0).unwrap();
    let tr = integrate(
        &sys,
        &PhaseState::point(1.0, 0.0),
        1e-3,
        100.0,
        Integrator::Split,
    )
    .unwrap();
    assert_eq!(tr.len(), 100_001);
    let e = energy_series(&tr, &sys).unwrap().values;
    let drift = e.iter().map(|v| (v - e[0]).abs()).fold(0.0, f64::max) / e[0];
    assert!(drift <= 1e-6, "relative drift {drift:e}");
    // Oscillatory rather than secular: the last period's worst error is no
    // larger than the first period's.
    let period = (2.0 * std::f64::consts::PI / 1e-3) as usize;
    let first = e[..period]
        .iter()
        .map(|v| (v - e[0]).abs())
        .fold(0.0, f64::max);
    let last = e[e.len() - period..]
        .iter()
        .map(|v| (v - e[0]).abs())
        .fold(0.0, f64::max);
    assert!(last <= 1.01 * first, "first {first:e}, last {last:e}");
}

fn check_energy(sys: &SystemSpec, s0: PhaseState) {
    let tr = integrate(sys, &s0, 1e-3, 10.0, Integrator::Rk4).unwrap();
    let e = energy_series(&tr, sys).unwrap().values;
    for w in e.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "energy rose: {} -> {}", w[0], w[1]);
    }
    let r = dissipation_residual(&tr, sys).unwrap();
    let worst = r.iter().map(|v| v.abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-4, "residual {worst:e}");
}

#[test]
fn energy_decreases_dsho() {
    check_energy(
        &SystemSpec::dsho(1.0, 0.1).unwrap(),
        PhaseState::point(1.0, 0.0),
    );
}

#[test]
fn energy_decreases_cubic_well() {
    check_energy(
        &SystemSpec::cubic_barrier(1.0, 1.0, 0.1).unwrap(),
        PhaseState::point(0.3, 0.0),
    );
}

fn pulled_back(s: &PhaseState, sys: &SystemSpec, w: f64) -> PhaseVelocity {
    let j = ComplexStructure::new(w, sys.dim()).unwrap();
    let v = canonical_vector_field(&shift_state(s, sys).unwrap(), sys, &j).unwrap();
    pull_back_velocity(&v, &s.x, sys).unwrap()
}

proptest! {
    #[test]
    fn canonical_equals_direct(gamma in 0.0f64..0.9, x in -2.0f64..2.0, p in -2.0f64..2.0, cubic in any::<bool>()) {
        let sys = if cubic {
            SystemSpec::cubic_barrier(1.3, 1.0, gamma).unwrap()
        } else {
            SystemSpec::dsho(1.0, gamma).unwrap()
        };
        let s = PhaseState::point(x, p);
        let d = direct_vector_field(&s, &sys).unwrap();
        let c = pulled_back(&s, &sys, 0.8);
        prop_assert!((c.dp[0] - d.dp[0]).abs() <= 1e-10 && (c.dx[0] - d.dx[0]).abs() <= 1e-10);
    }

    #[test]
    fn flow_independent_of_omega2(gamma in 0.0f64..0.9, x in -2.0f64..2.0, p in -2.0f64..2.0) {
        let sys = SystemSpec::cubic_barrier(1.0, 1.0, gamma).unwrap();
        let s = PhaseState::point(x, p);
        let base = pulled_back(&s, &sys, 1.0);
        for w in [0.5, 2.0] {
            let v = pulled_back(&s, &sys, w);
            prop_assert!((v.dp[0] - base.dp[0]).abs() <= 1e-10 && (v.dx[0] - base.dx[0]).abs() <= 1e-10);
        }
    }
}

#[test]
fn direct_field_examples() {
    let sys = SystemSpec::dsho(1.0, 0.1).unwrap();
    let v = direct_vector_field(&PhaseState::point(1.0, 0.0), &sys).unwrap();
    assert_eq!((v.dp[0], v.dx[0]), (-1.0, 0.0));
    let v = direct_vector_field(&PhaseState::point(0.0, 1.0), &sys).unwrap();
    assert!((v.dp[0] + 0.2).abs() < 1e-15 && v.dx[0] == 1.0);
}

#[test]
fn exact_solution_examples() {
    let z0 = Complex64::new(0.4, -0.2);
    assert_eq!(dsho_exact(1.0, 0.1, z0, 0.0).unwrap(), z0);
    let z = dsho_exact(1.0, 0.0, Complex64::new(1.0, 0.0), std::f64::consts::PI).unwrap();
    assert!((z + 1.0).norm() < 1e-15);
    let r = dsho_exact(1.0, 0.1, z0, 10.0).unwrap().norm() / z0.norm();
    assert!((r - (-1.0f64).exp()).abs() < 1e-14);
    assert!(dsho_exact(1.0, 1.0, z0, 1.0).is_err());
}
