use anyhow::Result;
use growth_flow::{CandidateValue, Evaluator, FlowSettings, PolicyFunction};
use growth_model::OgEconomy;
use serde::Serialize;

use crate::scenario::VerifySpec;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self { name, value, tolerance, pass: value <= tolerance }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub k_bar: f64,
    pub checks: Vec<Check>,
    pub pass: bool,
    /// Names of the checks that failed.
    pub failing: Vec<&'static str>,
    /// Distance from `σ(k)` to the best consumption on the payoff grid, in
    /// grid cells, at each sampled `k`.
    pub argmax_offsets: Vec<f64>,
    /// Effective discount rate at each residual grid point; `null` where the
    /// value is too close to zero for the ratio to mean anything.
    pub effective_rates: Vec<Option<f64>>,
    pub residual_grid: Vec<f64>,
    pub ie_residuals: Vec<f64>,
    pub de_residuals: Vec<f64>,
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn sup(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(x.abs()) })
}

pub fn grid_over(policy: &PolicyFunction, n: usize) -> Vec<f64> {
    let (lo, hi) = policy.domain();
    grid(lo, hi, n)
}

/// A certificate value that could not be computed, typically because the
/// flow from that point never settles, counts as an unbounded violation.
fn or_unbounded<E>(r: std::result::Result<f64, E>) -> f64 {
    r.unwrap_or(f64::INFINITY)
}

/// Runs the equilibrium certificates for a policy and its candidate value:
/// IE and DE residuals on `ks`, the envelope identity `v' = u'(σ)`, the
/// instantaneous deviation argmax and the flow semigroup property.
pub fn verify_equilibrium(
    econ: &OgEconomy,
    policy: &PolicyFunction,
    value: &CandidateValue,
    k_bar: f64,
    spec: &VerifySpec,
    ks: &[f64],
) -> Result<VerificationReport> {
    let settings = FlowSettings { rtol: 1e-10, atol: 1e-12, ..FlowSettings::default() };
    let ev = Evaluator::new(policy, &econ.tech, econ.utility).with_settings(settings);
    let kern = econ.kernel();
    let (lo, hi) = policy.domain();
    let ie: Vec<f64> = ks.iter().map(|&k| or_unbounded(ev.ie_residual(&kern, value, &[k]).map(|r| r[0]))).collect();
    let de: Vec<f64> = ks.iter().map(|&k| or_unbounded(ev.de_residual(&kern, value, &[k]).map(|r| r[0]))).collect();

    // Envelope: centred difference of the flow value against u'(σ(k)),
    // relative, away from the domain edges.
    let mut envelope = 0.0f64;
    for k in grid(lo, hi, 7).into_iter().skip(1).take(5) {
        let dk = 1e-3 * (1.0 + k);
        let fd = ev.value(&kern, k + dk).and_then(|a| Ok((a - ev.value(&kern, k - dk)?) / (2.0 * dk)));
        let up = econ.utility.marginal(policy.sigma(k));
        envelope = envelope.max(or_unbounded(fd.map(|fd| ((fd - up) / up).abs())));
    }

    let mut offsets = Vec::with_capacity(spec.argmax_points);
    for k in grid(lo, hi, spec.argmax_points) {
        let s = policy.sigma(k);
        let cs = grid(0.5 * s, 1.5 * s, spec.payoff_grid);
        let cell = cs[1] - cs[0];
        offsets.push(or_unbounded(ev.perturbation_payoffs(&kern, k, &cs).map(|pay| {
            let best = (0..cs.len()).max_by(|&i, &j| pay[i].total_cmp(&pay[j])).expect("non-empty grid");
            (cs[best] - s).abs() / cell
        })));
    }

    let mut semigroup = 0.0f64;
    for k in grid(lo, hi, 5) {
        let (t, s) = (5.0, 5.0);
        let gap = ev.integrate_flow(k, t + s).and_then(|direct| {
            let mid = ev.integrate_flow(k, t)?.capital(t);
            Ok((direct.capital(t + s) - ev.integrate_flow(mid, s)?.capital(s)).abs() / (1.0 + k))
        });
        semigroup = semigroup.max(or_unbounded(gap));
    }

    let effective_rates = ks.iter().map(|&k| ev.effective_discount_rate(&kern, k).ok()).collect();

    let checks = vec![
        Check::new("ie_residual", sup(&ie), spec.ie_tol),
        Check::new("de_residual", sup(&de), spec.de_tol),
        Check::new("envelope", envelope, spec.envelope_tol),
        Check::new("argmax", sup(&offsets), 1.0),
        Check::new("semigroup", semigroup, spec.semigroup_tol),
    ];
    let failing: Vec<&'static str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    Ok(VerificationReport {
        k_bar,
        pass: failing.is_empty(),
        checks,
        failing,
        argmax_offsets: offsets,
        effective_rates,
        residual_grid: ks.to_vec(),
        ie_residuals: ie,
        de_residuals: de,
    })
}

impl VerificationReport {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.value)
    }
}
