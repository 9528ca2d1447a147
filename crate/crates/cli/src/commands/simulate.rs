use anyhow::{Context, Result};
use growth_model::OgEconomy;
use growth_og::Equilibrium;
use growth_phase::{psi_path, simulate_policy, SimOptions, Trajectory};
use serde::{Deserialize, Serialize};

use super::{primary_k_bar, solve_at, Ctx, Timer};
use crate::output::{num, write_csv, write_json, Manifest, Outcome};
use crate::scenario::{Loaded, Scenario};

pub const TRAJECTORY_COLUMNS: [&str; 6] = ["t", "K", "C", "W", "psi", "residual_autonomous"];
pub const MANIFEST: &str = "simulate_manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateDetails {
    pub k_bar: f64,
    pub k0: f64,
    pub horizon: f64,
    pub samples: usize,
    pub terminal_t: f64,
    pub terminal_k: f64,
    pub terminal_c: f64,
    pub terminal_w: f64,
    pub psi_terminal: f64,
    /// `δ - f'(k̄)`, the limit of `ψ` along a convergent path.
    pub psi_limit: f64,
    pub max_residual_autonomous: f64,
}

/// Largest relative mismatch between the policy-driven path and the
/// autonomous `(K, C, W)` system at one sample: `C'/C` against
/// `f' - δ + ψ`, and `W'` against its law of motion.
fn autonomous_residual(econ: &OgEconomy, eq: &Equilibrium, k: f64, c: f64, w: f64, psi: f64) -> f64 {
    let (d, r, p) = (econ.private_rate, econ.social_rate, econ.death_rate);
    let (f, fp) = (econ.tech.output(k), econ.tech.marginal(k));
    let kdot = f - c;
    let growth = eq.policy.sigma_prime(k) * kdot / c;
    let rc = growth - (fp - d + psi);
    let wdot = eq.pair.unborn_deriv(k) * kdot;
    let rw = wdot + (p * kdot / c + p * c.ln() - r * (p + d) * w) / d;
    rc.abs().max(rw.abs() / (1.0 + w.abs()))
}

pub struct Simulated {
    pub traj: Trajectory,
    pub details: SimulateDetails,
}

/// Solves for the requested steady state, simulates from `k0` and writes
/// `trajectory.csv` and the simulate manifest.
pub fn simulate(ctx: &Ctx, s: &Scenario, hash: &str) -> Result<Simulated> {
    let timer = Timer::start();
    let econ = s.economy()?;
    let k_bar = primary_k_bar(ctx, s)?;
    let k0 = ctx.args.k0.or(s.simulate.k0).unwrap_or(s.simulate.k0_ratio * k_bar);
    let horizon = ctx.args.horizon.unwrap_or(s.simulate.horizon);
    let eq = solve_at(s, &econ, k_bar, Some(k0))?;
    let opts = SimOptions { rtol: 1e-10, atol: 1e-12, sample_dt: s.simulate.sample_dt };
    let traj = simulate_policy(&eq.policy, &eq.pair, &econ.tech, k0, horizon, &opts)
        .with_context(|| format!("simulating from K0 = {k0} toward k̄ = {k_bar}"))?;
    let psi = psi_path(&traj, &econ);
    let mut rows = Vec::with_capacity(traj.len());
    let mut worst = 0.0f64;
    for i in 0..traj.len() {
        let (k, c, w) = (traj.capital[i], traj.consumption[i], traj.unborn[i]);
        let res = autonomous_residual(&econ, &eq, k, c, w, psi[i]);
        worst = worst.max(res);
        rows.push(vec![num(traj.times[i]), num(k), num(c), num(w), num(psi[i]), num(res)]);
    }
    write_csv(&ctx.path("trajectory.csv"), &TRAJECTORY_COLUMNS, &rows)?;
    let (t, k, c, w) = traj.last();
    let details = SimulateDetails {
        k_bar,
        k0,
        horizon,
        samples: traj.len(),
        terminal_t: t,
        terminal_k: k,
        terminal_c: c,
        terminal_w: w,
        psi_terminal: psi[psi.len() - 1],
        psi_limit: econ.private_rate - econ.tech.marginal(k_bar),
        max_residual_autonomous: worst,
    };
    let m = Manifest::new("simulate", hash.to_owned(), Outcome::AllPass, timer.seconds(), details.clone());
    write_json(&ctx.path(MANIFEST), &m)?;
    Ok(Simulated { traj, details })
}

pub fn run(ctx: &Ctx, loaded: &Loaded) -> Result<Outcome> {
    simulate(ctx, &loaded.scenario, &loaded.hash)?;
    Ok(Outcome::AllPass)
}
