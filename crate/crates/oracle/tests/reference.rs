use approx::assert_relative_eq;
use growth_flow::{CandidateValue, Evaluator, PolicyFunction};
use growth_model::{OgEconomy, Technology, Utility};
use growth_og::{solve_value_pair, steady_state_interval, OmegaRequest, SolveOptions};
use growth_oracle::{
    de_linear_slope, footnote_g, hjb_constant_discount_check, hjb_example_residual, ie_linear_slope,
    linear_equilibrium_policy, linear_naive_policy, pinned_offset, LinearCase,
};
use proptest::prelude::*;

fn footnote_case() -> LinearCase {
    LinearCase::new(0.08, 0.10, 0.05, 1.0).unwrap()
}

#[test]
fn flow_engine_reproduces_the_equilibrium_slope() {
    let c = footnote_case();
    let s = de_linear_slope(&c).unwrap();
    assert_relative_eq!(s, c.equilibrium_slope(), max_relative = 1e-6);
    assert!((s - 0.051250).abs() < 1e-6);
}

#[test]
fn integral_equation_picks_the_reciprocal_discount_mass() {
    let c = footnote_case();
    let h0 = (1.0 - (-0.1f64).exp()) / 0.1 + (-0.05f64).exp() / 0.05;
    assert_relative_eq!(ie_linear_slope(&c).unwrap(), 1.0 / h0, max_relative = 1e-6);
    assert!((1.0 / h0 - c.equilibrium_slope()).abs() > 1e-3);
}

#[test]
fn constant_discounting_collapses_naive_and_equilibrium() {
    let c = LinearCase::new(0.08, 0.07, 0.07, 3.0).unwrap();
    assert_eq!(linear_equilibrium_policy(&c, 2.0), linear_naive_policy(&c, 2.0));
    assert_relative_eq!(de_linear_slope(&c).unwrap(), 0.07, max_relative = 1e-9);
}

#[test]
fn late_switch_approaches_the_naive_rule() {
    let c = LinearCase::new(0.08, 0.10, 0.05, 2000.0).unwrap();
    assert_relative_eq!(linear_equilibrium_policy(&c, 1.0), 0.10, max_relative = 1e-12);
}

#[test]
fn footnote_identity_holds_once_its_constant_is_pinned() {
    let c = footnote_case();
    let s = c.equilibrium_slope();
    // Constant of the candidate value from the flow engine: the DE residual
    // is affine in it with coefficient δ₀.
    let pol = PolicyFunction::linear(s).unwrap();
    let tech = c.tech();
    let ev = Evaluator::new(&pol, &tech, Utility::Log);
    let r0 = ev.de_residual(&c.kernel(), &CandidateValue::log_linear(1.0 / s, 0.0), &[1.0]).unwrap()[0];
    let offset_v = -r0 / c.near_rate;
    let offset_g = pinned_offset(&c, offset_v);
    for k in [0.1, 0.7, 1.0, 3.0, 25.0, 400.0] {
        assert!(hjb_example_residual(&c, k, offset_v, offset_g).abs() <= 1e-8, "k = {k}");
    }
    // The pinned constant is g(1) computed from its definition.
    assert_relative_eq!(offset_g, footnote_g(&c, 1.0), max_relative = 1e-8);
    // g(k) - g(1) = e^{-δ₁τ}/δ₁ ln k.
    let mass = (-0.05f64).exp() / 0.05;
    assert_relative_eq!(footnote_g(&c, 5.0) - footnote_g(&c, 1.0), mass * 5f64.ln(), max_relative = 1e-9);
}

#[test]
fn hjb_holds_for_the_linear_optimum() {
    let tech = Technology::linear(0.08).unwrap();
    let pol = PolicyFunction::linear(0.05).unwrap();
    let chk = hjb_constant_discount_check(&pol, &tech, 0.05, Utility::Log, &[0.3, 1.0, 4.0, 20.0]).unwrap();
    assert!(chk.max_hjb() <= 1e-8, "{:?}", chk.hjb);
    assert!(chk.max_euler() <= 1e-14);
}

#[test]
fn hjb_detects_a_perturbed_policy() {
    let tech = Technology::linear(0.08).unwrap();
    let pol = PolicyFunction::linear(0.05).unwrap().scaled(1.05);
    let chk = hjb_constant_discount_check(&pol, &tech, 0.05, Utility::Log, &[0.3, 1.0, 4.0, 20.0]).unwrap();
    assert!(chk.hjb.iter().all(|r| r.abs() > 1e-3), "{:?}", chk.hjb);
    assert!(chk.euler.iter().all(|r| r.abs() > 1e-3));
}

#[test]
fn time_consistent_og_policy_solves_the_classical_problem() {
    let e = OgEconomy::new(0.05, 0.05, 0.04, Technology::cobb_douglas(1.0, 0.3).unwrap()).unwrap();
    let kb = steady_state_interval(&e).unwrap().k_lo;
    let eq = solve_value_pair(&e, kb, OmegaRequest::around(kb, 0.3), &SolveOptions::default()).unwrap();
    let (lo, hi) = eq.pair.domain();
    let grid: Vec<f64> = (0..25).map(|i| lo + (hi - lo) * i as f64 / 24.0).collect();
    let chk = hjb_constant_discount_check(&eq.policy, &e.tech, 0.05, Utility::Log, &grid).unwrap();
    assert!(chk.max_euler() <= 1e-5, "{:e}", chk.max_euler());
    assert!(chk.max_hjb() <= 1e-5, "{:e}", chk.max_hjb());
    let bad = hjb_constant_discount_check(&eq.policy.scaled(1.05), &e.tech, 0.05, Utility::Log, &grid[..20]).unwrap();
    assert!(bad.max_hjb() > 1e-3);
}

proptest! {
    #[test]
    fn equilibrium_rule_saves_more_than_the_naive_rule(
        a in 0.01f64..0.2, d1 in 0.01f64..0.1, gap in 1e-3f64..0.1, tau in 0.1f64..30.0, k in 0.1f64..100.0
    ) {
        let c = LinearCase::new(a, d1 + gap, d1, tau).unwrap();
        prop_assert!(linear_equilibrium_policy(&c, k) < linear_naive_policy(&c, k));
        prop_assert!(c.equilibrium_slope() > 0.0);
    }
}
