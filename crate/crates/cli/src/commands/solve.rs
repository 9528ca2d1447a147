use anyhow::Result;
use growth_og::{stability_test, Equilibrium, LeftStart};
use rayon::prelude::*;
use serde::Serialize;

use super::{admissible, run_dir, solve_at, Ctx, Timer};
use crate::output::{num, write_csv, write_json, Manifest, Outcome};
use crate::scenario::{Loaded, RunTarget, Scenario};
use crate::verification::{grid_over, verify_equilibrium, VerificationReport};

pub const POLICY_COLUMNS: [&str; 8] = ["k", "sigma", "v", "w", "v_prime", "w_prime", "ie_residual", "de_residual"];
pub const VALUEPAIR_COLUMNS: [&str; 7] = ["k", "sigma", "sigma_prime", "v", "v_prime", "w", "w_prime"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// Solved and verified.
    Ok,
    /// Solved, but a certificate failed.
    Unverified,
    /// `k̄` lies outside the steady-state interval.
    Inadmissible,
    /// The solver or the verification raised an error.
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub index: usize,
    pub dir: String,
    pub label: &'static str,
    pub k_bar: f64,
    pub status: RunStatus,
    /// Whether `policy.csv` and `valuepair.csv` were written.
    pub written: bool,
    pub message: Option<String>,
    pub domain: Option<(f64, f64)>,
    pub knots: Option<usize>,
    pub left_start: Option<String>,
    pub stability_closed_form: Option<f64>,
    pub stability_numerical: Option<f64>,
    pub max_ie_residual: Option<f64>,
    pub max_de_residual: Option<f64>,
    pub failing_checks: Vec<&'static str>,
}

#[derive(Debug, Serialize)]
pub struct SolveDetails {
    pub runs: Vec<RunRecord>,
}

struct Solved {
    eq: Equilibrium,
    report: VerificationReport,
    stability: Result<(f64, f64), String>,
}

fn left_start(s: &LeftStart) -> String {
    match s {
        LeftStart::Series { offset } => format!("series at offset {offset:e}"),
        LeftStart::Quadratic { eps, halvings, .. } => {
            format!("quadratic seed at offset {eps:e} after {halvings} halvings")
        }
    }
}

fn solve_one(s: &Scenario, k_bar: f64) -> Result<Solved> {
    let econ = s.economy()?;
    let eq = solve_at(s, &econ, k_bar, None)?;
    let ks = grid_over(&eq.policy, s.solver.grid_points);
    let report = verify_equilibrium(&econ, &eq.policy, &eq.pair.candidate_value(), k_bar, &s.verify, &ks)?;
    let stability = match stability_test(&econ, &eq.pair) {
        Ok(r) => Ok((r.closed_form, r.numerical)),
        Err(e) => Err(e.to_string()),
    };
    Ok(Solved { eq, report, stability })
}

fn write_policy(dir: &std::path::Path, solved: &Solved) -> Result<()> {
    let eq = &solved.eq;
    let v = eq.pair.candidate_value();
    let r = &solved.report;
    let rows: Vec<Vec<String>> = r
        .residual_grid
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            vec![
                num(k),
                num(eq.policy.sigma(k)),
                num(v.value(k)),
                num(eq.pair.unborn(k)),
                num(v.deriv(k)),
                num(eq.pair.unborn_deriv(k)),
                num(r.ie_residuals[i]),
                num(r.de_residuals[i]),
            ]
        })
        .collect();
    write_csv(&dir.join("policy.csv"), &POLICY_COLUMNS, &rows)?;
    let p = &eq.pair;
    let knots: Vec<Vec<String>> = (0..p.ks.len())
        .map(|i| {
            vec![num(p.ks[i]), num(p.sigma[i]), num(p.sigma_p[i]), num(p.v[i]), num(p.vp[i]), num(p.w[i]), num(p.wp[i])]
        })
        .collect();
    write_csv(&dir.join("valuepair.csv"), &VALUEPAIR_COLUMNS, &knots)
}

fn record(index: usize, t: RunTarget, status: RunStatus, message: Option<String>) -> RunRecord {
    RunRecord {
        index,
        dir: run_dir(index),
        label: t.label,
        k_bar: t.k_bar,
        status,
        written: false,
        message,
        domain: None,
        knots: None,
        left_start: None,
        stability_closed_form: None,
        stability_numerical: None,
        max_ie_residual: None,
        max_de_residual: None,
        failing_checks: Vec::new(),
    }
}

pub fn run(ctx: &Ctx, loaded: &Loaded) -> Result<Outcome> {
    let timer = Timer::start();
    let s = &loaded.scenario;
    let econ = s.economy()?;
    let targets = match ctx.args.k_bar {
        Some(k_bar) => vec![RunTarget { k_bar, label: "command line" }],
        None => s.targets()?,
    };
    let results: Vec<Option<Result<Solved>>> = targets
        .par_iter()
        .map(|t| match admissible(&econ, t.k_bar) {
            Ok(true) => Some(solve_one(s, t.k_bar)),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        })
        .collect();

    let mut runs = Vec::with_capacity(targets.len());
    for (i, (t, res)) in targets.iter().zip(results).enumerate() {
        let dir = ctx.path(&run_dir(i));
        std::fs::create_dir_all(&dir)?;
        let rec = match res {
            None => record(i, *t, RunStatus::Inadmissible, Some("k̄ lies outside the steady-state interval".into())),
            Some(Err(e)) => record(i, *t, RunStatus::Failed, Some(format!("{e:#}"))),
            Some(Ok(solved)) => {
                let r = &solved.report;
                let status = if r.pass { RunStatus::Ok } else { RunStatus::Unverified };
                let mut rec = record(i, *t, status, None);
                write_json(&dir.join("verification.json"), r)?;
                if r.pass || ctx.args.allow_unverified {
                    write_policy(&dir, &solved)?;
                    rec.written = true;
                } else {
                    rec.message =
                        Some("verification failed; policy withheld (pass --allow-unverified to write it)".into());
                }
                rec.domain = Some(solved.eq.pair.domain());
                rec.knots = Some(solved.eq.pair.ks.len());
                rec.left_start = Some(left_start(&solved.eq.report.left_start));
                match solved.stability {
                    Ok((c, n)) => {
                        rec.stability_closed_form = Some(c);
                        rec.stability_numerical = Some(n);
                    }
                    Err(e) => rec.message = Some(format!("stability: {e}")),
                }
                rec.max_ie_residual = r.value("ie_residual");
                rec.max_de_residual = r.value("de_residual");
                rec.failing_checks = r.failing.clone();
                rec
            }
        };
        runs.push(rec);
    }
    let passed = runs.iter().filter(|r| r.status == RunStatus::Ok).count();
    let outcome = Outcome::from_counts(passed, runs.len());
    let manifest = Manifest::new("solve", loaded.hash.clone(), outcome, timer.seconds(), SolveDetails { runs });
    write_json(&ctx.path("manifest.json"), &manifest)?;
    Ok(outcome)
}
