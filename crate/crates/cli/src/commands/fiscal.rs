use anyhow::{Context, Result};
use growth_fiscal::{
    allocation_rule, cutoff_age, cutoff_age_at, long_run_tax, lump_sum_present_values, market_steady_state,
    steady_state_subsidy, tax_surface, uniform_subsidy, AllocationVariant,
};
use growth_og::steady_state_interval;
use growth_phase::{Provenance, Trajectory};
use serde::Serialize;

use super::simulate::{simulate, SimulateDetails, MANIFEST, TRAJECTORY_COLUMNS};
use super::{Ctx, Timer};
use crate::output::{num, read_columns, write_csv, write_json, Manifest, Outcome};
use crate::scenario::{Loaded, RuleSpec, Scenario};

pub const TAX_COLUMNS: [&str; 3] = ["n", "t", "eta"];

/// Half-width of the age bracket used to certify the sign change at `ñ`.
const CERTIFY_STEP: f64 = 0.5;

#[derive(Debug, Serialize)]
pub struct CutoffCertificate {
    pub age_below: f64,
    pub eta_below: f64,
    pub age_above: f64,
    pub eta_above: f64,
    pub certified: bool,
}

#[derive(Debug, Serialize)]
pub struct LumpSumRow {
    pub vintage: f64,
    pub date: f64,
    pub consumption: f64,
    pub human_wealth: f64,
    pub assets: f64,
    pub b: f64,
    pub tail_share: f64,
}

#[derive(Debug, Serialize)]
pub struct FiscalSummary {
    pub rule: RuleSpec,
    pub k_bar: f64,
    pub k0: f64,
    /// Closed-form uniform subsidy.
    pub eta_bar: f64,
    /// `(δ - f'(k̄))/f'(k̄)` at the run's steady state.
    pub steady_state_subsidy: f64,
    /// The same ratio at the upper end of the steady-state interval.
    pub steady_state_subsidy_at_lrp: Option<f64>,
    /// `ln((δ+π)/π)/δ`.
    pub n_tilde: f64,
    /// Root of the stationary tax in age at the upper end of the interval.
    pub n_tilde_at_lrp: Option<f64>,
    /// Root of the stationary tax in age at the run's steady state.
    pub n_tilde_at_k_bar: Option<f64>,
    pub n_tilde_certificate: Option<CutoffCertificate>,
    pub psi_terminal: f64,
    pub psi_limit: f64,
    pub max_abs_eta: f64,
    /// Largest spread of the tax across ages at any date.
    pub max_age_spread: f64,
    pub k_m: Option<f64>,
    pub k_m_marginal: Option<f64>,
    pub k_m_error: Option<String>,
    pub b: Vec<LumpSumRow>,
}

/// The simulate artifacts if they match the requested steady state,
/// otherwise a fresh simulation.
fn trajectory(ctx: &Ctx, s: &Scenario, hash: &str) -> Result<(Trajectory, SimulateDetails)> {
    let (tpath, mpath) = (ctx.path("trajectory.csv"), ctx.path(MANIFEST));
    if tpath.exists() && mpath.exists() {
        let text = std::fs::read_to_string(&mpath)?;
        let m: serde_json::Value =
            serde_json::from_str(&text).with_context(|| format!("reading {}", mpath.display()))?;
        let d: SimulateDetails = serde_json::from_value(m["details"].clone())
            .with_context(|| format!("{} is not a simulate manifest", mpath.display()))?;
        let same = ctx.args.k_bar.is_none_or(|k| k == d.k_bar)
            && ctx.args.k0.is_none_or(|k| k == d.k0)
            && ctx.args.horizon.is_none_or(|h| h == d.horizon);
        if same {
            let c = read_columns(&tpath, &TRAJECTORY_COLUMNS)?;
            let traj = Trajectory {
                times: c[0].clone(),
                capital: c[1].clone(),
                consumption: c[2].clone(),
                unborn: c[3].clone(),
                provenance: Provenance::PolicyDriven,
                settled: false,
            };
            return Ok((traj, d));
        }
    }
    let sim = simulate(ctx, s, hash)?;
    Ok((sim.traj, sim.details))
}

pub fn run(ctx: &Ctx, loaded: &Loaded) -> Result<Outcome> {
    let timer = Timer::start();
    let s = &loaded.scenario;
    let econ = s.economy()?;
    let (traj, sim) = trajectory(ctx, s, &loaded.hash)?;
    let variant: AllocationVariant = s.fiscal.rule.into();
    let rule = allocation_rule(&econ, variant);
    let n_ages = (s.fiscal.max_age / s.fiscal.age_step).round() as usize;
    let ages: Vec<f64> = (0..=n_ages).map(|i| i as f64 * s.fiscal.age_step).collect();
    let sched = tax_surface(&traj, rule, &econ, &ages)?;

    let mut rows = Vec::with_capacity(ages.len() * sched.times.len());
    let (mut max_abs, mut spread) = (0.0f64, 0.0f64);
    for (i, &t) in sched.times.iter().enumerate() {
        let row = &sched.eta[i];
        let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        spread = spread.max(hi - lo);
        for (j, &n) in ages.iter().enumerate() {
            max_abs = max_abs.max(row[j].abs());
            rows.push(vec![num(n), num(t), num(row[j])]);
        }
    }
    write_csv(&ctx.path("tax_surface.csv"), &TAX_COLUMNS, &rows)?;

    let iv = steady_state_interval(&econ)?;
    let lrp = (!iv.is_degenerate()).then_some(iv.k_hi);
    let n_tilde = cutoff_age(&econ);
    let optimal = allocation_rule(&econ, AllocationVariant::Optimal);
    let certificate = lrp.map(|k| {
        let (a, b) = ((n_tilde - CERTIFY_STEP).max(0.0), n_tilde + CERTIFY_STEP);
        let (ea, eb) = (long_run_tax(&econ, &optimal, k, a), long_run_tax(&econ, &optimal, k, b));
        CutoffCertificate { age_below: a, eta_below: ea, age_above: b, eta_above: eb, certified: ea > 0.0 && eb < 0.0 }
    });

    let (k_m, k_m_error) = match market_steady_state(&econ) {
        Ok(k) => (Some(k), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let lumps = lump_sum_present_values(&sched, &econ, &s.fiscal.vintages, s.fiscal.initial_assets.as_deref())?;
    let summary = FiscalSummary {
        rule: s.fiscal.rule,
        k_bar: sim.k_bar,
        k0: sim.k0,
        eta_bar: uniform_subsidy(&econ),
        steady_state_subsidy: steady_state_subsidy(&econ, sim.k_bar),
        steady_state_subsidy_at_lrp: lrp.map(|k| steady_state_subsidy(&econ, k)),
        n_tilde,
        n_tilde_at_lrp: lrp.and_then(|k| cutoff_age_at(&econ, &optimal, k)),
        n_tilde_at_k_bar: cutoff_age_at(&econ, &optimal, sim.k_bar),
        n_tilde_certificate: certificate,
        psi_terminal: sim.psi_terminal,
        psi_limit: sim.psi_limit,
        max_abs_eta: max_abs,
        max_age_spread: spread,
        k_m,
        k_m_marginal: k_m.map(|k| econ.tech.marginal(k)),
        k_m_error,
        b: lumps
            .iter()
            .map(|l| LumpSumRow {
                vintage: l.vintage,
                date: l.date,
                consumption: l.consumption,
                human_wealth: l.human_wealth,
                assets: l.assets,
                b: l.transfers,
                tail_share: l.tail_share,
            })
            .collect(),
    };
    let certified = summary.n_tilde_certificate.as_ref().is_none_or(|c| c.certified);
    let outcome = if certified { Outcome::AllPass } else { Outcome::Partial };
    let m = Manifest::new("fiscal", loaded.hash.clone(), outcome, timer.seconds(), summary);
    write_json(&ctx.path("fiscal_summary.json"), &m)?;
    Ok(outcome)
}
