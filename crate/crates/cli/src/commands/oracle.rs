use anyhow::Result;
use growth_flow::{CandidateValue, Evaluator, PolicyFunction};
use growth_model::Utility;
use growth_oracle::{
    de_linear_slope, footnote_g, hjb_constant_discount_check, hjb_example_residual, ie_linear_slope, pinned_offset,
    LinearCase,
};
use serde::Serialize;

use super::{Ctx, Timer};
use crate::output::{write_json, Manifest, Outcome};
use crate::scenario::{Loaded, OracleSpec};

/// Relative agreement required between the flow-engine slope and the
/// closed form.
pub const SLOPE_TOL: f64 = 1e-6;
/// Largest residual of the pinned log-linear identity.
pub const IDENTITY_TOL: f64 = 1e-8;
const HJB_TOL: f64 = 1e-8;

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub case: OracleSpec,
    pub naive_slope: f64,
    pub equilibrium_slope: f64,
    pub de_slope: f64,
    pub de_slope_relative_error: f64,
    /// `1/∫h`: the integral equation's slope, which the jump in the kernel
    /// separates from the equilibrium slope.
    pub ie_slope: f64,
    pub value_offset: f64,
    pub g_offset: f64,
    pub g_at_one: f64,
    pub max_identity_residual: f64,
    /// HJB residual of `σ = ρ k` with the constant rate `δ₁`.
    pub constant_discount_hjb: f64,
    pub pass: bool,
}

pub fn report(spec: &OracleSpec) -> Result<OracleReport> {
    let c = LinearCase::new(spec.productivity, spec.near_rate, spec.far_rate, spec.switch)?;
    let s = c.equilibrium_slope();
    let de = de_linear_slope(&c)?;
    let ie = ie_linear_slope(&c)?;
    let pol = PolicyFunction::linear(s)?;
    let tech = c.tech();
    let ev = Evaluator::new(&pol, &tech, Utility::Log);
    let r0 = ev.de_residual(&c.kernel(), &CandidateValue::log_linear(1.0 / s, 0.0), &[1.0])?[0];
    let offset_v = -r0 / c.near_rate;
    let offset_g = pinned_offset(&c, offset_v);
    let identity = [0.1, 0.5, 1.0, 2.0, 10.0, 100.0]
        .iter()
        .map(|&k| hjb_example_residual(&c, k, offset_v, offset_g).abs())
        .fold(0.0, f64::max);
    let hjb = hjb_constant_discount_check(
        &PolicyFunction::linear(c.far_rate)?,
        &tech,
        c.far_rate,
        Utility::Log,
        &[0.5, 1.0, 4.0, 20.0],
    )?
    .max_hjb();
    let rel = (de - s).abs() / s;
    Ok(OracleReport {
        case: spec.clone(),
        naive_slope: c.naive_slope(),
        equilibrium_slope: s,
        de_slope: de,
        de_slope_relative_error: rel,
        ie_slope: ie,
        value_offset: offset_v,
        g_offset: offset_g,
        g_at_one: footnote_g(&c, 1.0),
        max_identity_residual: identity,
        constant_discount_hjb: hjb,
        pass: rel <= SLOPE_TOL && identity <= IDENTITY_TOL && hjb <= HJB_TOL,
    })
}

pub fn run(ctx: &Ctx, loaded: Option<&Loaded>) -> Result<Outcome> {
    let timer = Timer::start();
    let spec = loaded.map(|l| l.scenario.oracle.clone()).unwrap_or_default();
    let r = report(&spec)?;
    let outcome = if r.pass { Outcome::AllPass } else { Outcome::Failed };
    let hash = loaded.map(|l| l.hash.clone()).unwrap_or_default();
    write_json(&ctx.path("oracle.json"), &Manifest::new("oracle", hash, outcome, timer.seconds(), r))?;
    Ok(outcome)
}
