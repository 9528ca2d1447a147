use std::sync::OnceLock;

use approx::assert_relative_eq;
use growth_model::{OgEconomy, Technology};
use growth_og::{solve_value_pair, stability_test, Equilibrium, OmegaRequest, SolveOptions};
use growth_phase::{psi_path, simulate_autonomous, simulate_policy, PhaseError, Provenance, SimOptions};

fn canonical() -> OgEconomy {
    OgEconomy::new(0.06, 0.02, 0.04, Technology::cobb_douglas(1.0, 0.3).unwrap()).unwrap()
}

fn equilibrium() -> &'static Equilibrium {
    static CELL: OnceLock<Equilibrium> = OnceLock::new();
    CELL.get_or_init(|| {
        solve_value_pair(&canonical(), 12.0, OmegaRequest { lo: 9.0, hi: 14.0 }, &SolveOptions::default()).unwrap()
    })
}

#[test]
fn policy_path_rises_monotonically_to_steady_state() {
    let e = canonical();
    let eq = equilibrium();
    let k0 = 10.0;
    let tr = simulate_policy(&eq.policy, &eq.pair, &e.tech, k0, 3000.0, &SimOptions::default()).unwrap();
    assert_eq!(tr.provenance, Provenance::PolicyDriven);
    // Monotone up to the integration tolerance (rtol 1e-10 on K ≈ 12).
    assert!(tr.capital.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    let (_, k, c, w) = tr.last();
    assert!((k - 12.0).abs() < 1e-6);
    assert!((c - e.tech.output(12.0)).abs() < 1e-6);
    assert_relative_eq!(w, e.steady_unborn(12.0), max_relative = 1e-6);
}

#[test]
fn steady_state_start_stays_put() {
    let e = canonical();
    let eq = equilibrium();
    let tr = simulate_policy(&eq.policy, &eq.pair, &e.tech, 12.0, 100.0, &SimOptions::default()).unwrap();
    assert!(tr.capital.iter().all(|k| (k - 12.0).abs() < 1e-10));
}

#[test]
fn convergence_rate_matches_stability_value() {
    let e = canonical();
    let eq = equilibrium();
    let rate = stability_test(&e, &eq.pair).unwrap().closed_form;
    let opts = SimOptions { sample_dt: 1.0, ..SimOptions::default() };
    let tr = simulate_policy(&eq.policy, &eq.pair, &e.tech, 11.0, 400.0, &opts).unwrap();
    // Slope of ln|K - k̄| over the last ten years before the gap drops below
    // 1e-7, where the linearization holds and roundoff does not.
    let end = tr.capital.iter().position(|k| (k - 12.0).abs() < 1e-7).unwrap();
    let (t0, t1) = (tr.times[end - 11], tr.times[end - 1]);
    let (g0, g1) = ((tr.capital[end - 11] - 12.0).abs().ln(), (tr.capital[end - 1] - 12.0).abs().ln());
    assert_relative_eq!((g1 - g0) / (t1 - t0), rate, max_relative = 1e-3);
}

#[test]
fn policy_path_satisfies_autonomous_system() {
    let e = canonical();
    let eq = equilibrium();
    let (d, r, p) = (e.private_rate, e.social_rate, e.death_rate);
    let tr = simulate_policy(&eq.policy, &eq.pair, &e.tech, 9.5, 200.0, &SimOptions::default()).unwrap();
    let psi = psi_path(&tr, &e);
    let mut worst = 0.0f64;
    for i in 0..tr.len() {
        let (k, c, w) = (tr.capital[i], tr.consumption[i], tr.unborn[i]);
        let gap = e.tech.output(k) - c;
        if gap.abs() < 1e-6 * c {
            continue;
        }
        let (_, sp, _) = eq.policy.eval_all(k);
        let growth = sp * gap / c;
        let dw = eq.pair.unborn_deriv(k) * gap;
        let r2 = growth - (e.tech.marginal(k) - d + psi[i]);
        let r3 = dw + (p * gap / c + p * c.ln() - r * (p + d) * w) / d;
        worst = worst.max(r2.abs()).max(r3.abs());
    }
    assert!(worst <= 1e-6, "{worst:e}");
}

#[test]
fn autonomous_and_policy_paths_coincide() {
    // Errors in the autonomous form grow like exp(c/|K - k̄|) as K nears k̄,
    // so the comparison covers the first 20 years (K from 10 to about 11.73).
    let e = canonical();
    let eq = equilibrium();
    let k0 = 10.0;
    let pol = simulate_policy(&eq.policy, &eq.pair, &e.tech, k0, 20.0, &SimOptions::default()).unwrap();
    let aut =
        simulate_autonomous(&e, k0, eq.policy.sigma(k0), eq.pair.unborn(k0), 20.0, &SimOptions::default()).unwrap();
    assert_eq!(aut.len(), pol.len());
    let gap = pol.consumption.iter().zip(&aut.consumption).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(gap <= 1e-5 * e.tech.output(12.0), "{gap:e}");
}

#[test]
fn psi_tends_to_the_marginal_product_gap() {
    let e = canonical();
    let eq = equilibrium();
    let tr = simulate_policy(&eq.policy, &eq.pair, &e.tech, 10.0, 3000.0, &SimOptions::default()).unwrap();
    let psi = psi_path(&tr, &e);
    let limit = 0.06 - e.tech.marginal(12.0);
    assert!((psi[psi.len() - 1] - limit).abs() < 1e-6);
    // Early on ψ is further from the limit than at the end.
    assert!((psi[0] - limit).abs() > (psi[psi.len() / 10] - limit).abs());
}

#[test]
fn time_consistent_economy_has_no_psi_and_classical_dynamics() {
    let e = OgEconomy::new(0.05, 0.05, 0.04, Technology::cobb_douglas(1.0, 0.3).unwrap()).unwrap();
    let kb = e.tech.marginal_inverse(0.05).unwrap();
    let eq = solve_value_pair(&e, kb, OmegaRequest::around(kb, 0.2), &SolveOptions::default()).unwrap();
    let k0 = 0.9 * kb;
    let pol = simulate_policy(&eq.policy, &eq.pair, &e.tech, k0, 20.0, &SimOptions::default()).unwrap();
    assert!(psi_path(&pol, &e).iter().all(|&x| x == 0.0));
    // W enters neither the K nor the C equation; it only shifts step sizes.
    let a = simulate_autonomous(&e, k0, eq.policy.sigma(k0), 0.0, 20.0, &SimOptions::default()).unwrap();
    let b = simulate_autonomous(&e, k0, eq.policy.sigma(k0), 123.0, 20.0, &SimOptions::default()).unwrap();
    for (x, y) in a.consumption.iter().zip(&b.consumption) {
        assert_relative_eq!(x, y, max_relative = 1e-8);
    }
    let gap = pol.consumption.iter().zip(&a.consumption).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(gap <= 1e-5 * e.tech.output(kb), "{gap:e}");
}

#[test]
fn start_outside_policy_domain_is_rejected() {
    let e = canonical();
    let eq = equilibrium();
    let err = simulate_policy(&eq.policy, &eq.pair, &e.tech, 30.0, 10.0, &SimOptions::default()).unwrap_err();
    assert!(matches!(err, PhaseError::InvalidArgument(_)));
}

#[test]
fn crossing_the_steady_state_manifold_is_flagged() {
    // With W far above its steady-state value the drift pushes C up into
    // output while π ln C - ρ(π+δ) W stays away from zero.
    let e = canonical();
    let k0 = 12.0;
    let c0 = 0.999 * e.tech.output(k0);
    let err = simulate_autonomous(&e, k0, c0, 100.0, 50.0, &SimOptions::default()).unwrap_err();
    assert!(matches!(err, PhaseError::SingularDrift { t } if t > 0.0 && t < 1.0), "{err}");
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

    #[test]
    fn policy_paths_approach_the_steady_state_without_crossing(k0 in 9.05f64..12.1) {
        let e = canonical();
        let eq = equilibrium();
        let tr = simulate_policy(&eq.policy, &eq.pair, &e.tech, k0, 400.0, &SimOptions::default()).unwrap();
        let side = (k0 - 12.0).signum();
        // Slack is the integration tolerance (rtol 1e-10 on K ≈ 12).
        for w in tr.capital.windows(2) {
            proptest::prop_assert!(side * (w[1] - 12.0) >= -1e-8);
            proptest::prop_assert!((w[1] - 12.0).abs() <= (w[0] - 12.0).abs() + 1e-8);
        }
    }
}
