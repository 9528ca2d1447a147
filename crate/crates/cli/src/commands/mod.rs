pub mod fiscal;
pub mod oracle;
pub mod simulate;
pub mod solve;
pub mod sweep;
pub mod verify;

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use growth_model::OgEconomy;
use growth_og::{solve_value_pair, steady_state_interval, Equilibrium, OgError, SolveOptions};

use crate::scenario::Scenario;
use crate::GlobalArgs;

pub struct Ctx {
    pub args: GlobalArgs,
    pub out: PathBuf,
}

impl Ctx {
    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

pub(crate) fn run_dir(index: usize) -> String {
    format!("run_{index:02}")
}

/// Steady state for single-equilibrium commands: `--k-bar`, else the first
/// scenario target.
pub(crate) fn primary_k_bar(ctx: &Ctx, s: &Scenario) -> Result<f64> {
    match ctx.args.k_bar {
        Some(k) => Ok(k),
        None => Ok(s.targets()?.first().context("scenario selects no steady state")?.k_bar),
    }
}

/// `k_bar` is admissible when interior to the interval, or equal to the
/// single point of a degenerate one.
pub(crate) fn admissible(econ: &OgEconomy, k_bar: f64) -> Result<bool> {
    let iv = steady_state_interval(econ)?;
    Ok(if iv.is_degenerate() { (k_bar - iv.k_lo).abs() <= 1e-12 * iv.k_lo } else { iv.contains_interior(k_bar) })
}

/// Near the lower end of the interval the reachable domain on one side can
/// be narrower than the default knot spacing; such solves are retried with
/// knots refined by each of these factors in turn.
const KNOT_REFINEMENTS: [f64; 2] = [1e-2, 1e-4];

pub(crate) fn solve_at(s: &Scenario, econ: &OgEconomy, k_bar: f64, include: Option<f64>) -> Result<Equilibrium> {
    anyhow::ensure!(admissible(econ, k_bar)?, "k̄ = {k_bar} is inadmissible: outside the steady-state interval");
    let omega = s.omega(k_bar, include);
    let base = s.solve_options();
    let mut res = solve_value_pair(econ, k_bar, omega, &base);
    for factor in KNOT_REFINEMENTS {
        if !matches!(res, Err(OgError::PolicyRejected(_))) {
            break;
        }
        let opts = SolveOptions { knot_min: base.knot_min * factor, ..base };
        res = solve_value_pair(econ, k_bar, omega, &opts);
    }
    res.with_context(|| format!("solving for k̄ = {k_bar}"))
}

pub(crate) struct Timer(Instant);

impl Timer {
    pub fn start() -> Self {
        Self(Instant::now())
    }

    pub fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}
