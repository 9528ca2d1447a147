use anyhow::{bail, Context, Result};
use growth_flow::{CandidateValue, PolicyFunction};
use serde::{Deserialize, Serialize};

use super::{Ctx, Timer};
use crate::commands::solve::VALUEPAIR_COLUMNS;
use crate::output::{read_columns, write_json, Manifest, Outcome};
use crate::scenario::Loaded;
use crate::verification::{grid_over, verify_equilibrium, VerificationReport};

#[derive(Debug, Deserialize)]
struct SolveManifest {
    details: SolveRuns,
}

#[derive(Debug, Deserialize)]
struct SolveRuns {
    runs: Vec<SolvedRun>,
}

#[derive(Debug, Deserialize)]
struct SolvedRun {
    dir: String,
    k_bar: f64,
    written: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifiedRun {
    pub dir: String,
    pub report: VerificationReport,
}

#[derive(Debug, Serialize)]
pub struct VerifyDetails {
    pub runs: Vec<VerifiedRun>,
}

/// Policy and candidate value rebuilt from a `valuepair.csv`.
pub fn load_value_pair(path: &std::path::Path, k_bar: f64) -> Result<(PolicyFunction, CandidateValue)> {
    let c = read_columns(path, &VALUEPAIR_COLUMNS)?;
    let policy = PolicyFunction::from_knots(c[0].clone(), c[1].clone(), c[2].clone(), Some(k_bar))
        .with_context(|| format!("rebuilding the policy from {}", path.display()))?;
    Ok((policy, CandidateValue::from_knots(c[0].clone(), c[3].clone(), c[4].clone())))
}

pub fn run(ctx: &Ctx, loaded: &Loaded) -> Result<Outcome> {
    let timer = Timer::start();
    let s = &loaded.scenario;
    let econ = s.economy()?;
    let mpath = ctx.path("manifest.json");
    let text = std::fs::read_to_string(&mpath)
        .with_context(|| format!("missing artifact {}; run `solve` first", mpath.display()))?;
    let manifest: SolveManifest =
        serde_json::from_str(&text).with_context(|| format!("{} is not a solve manifest", mpath.display()))?;
    let runs: Vec<&SolvedRun> = manifest.details.runs.iter().filter(|r| r.written).collect();
    if runs.is_empty() {
        bail!("no policy artifacts listed in {}", mpath.display());
    }
    let mut out = Vec::with_capacity(runs.len());
    for r in runs {
        let dir = ctx.path(&r.dir);
        let (policy, value) = load_value_pair(&dir.join("valuepair.csv"), r.k_bar)?;
        let ks = grid_over(&policy, s.verify.residual_points);
        let report = verify_equilibrium(&econ, &policy, &value, r.k_bar, &s.verify, &ks)?;
        write_json(&dir.join("verify_report.json"), &report)?;
        out.push(VerifiedRun { dir: r.dir.clone(), report });
    }
    let passed = out.iter().filter(|r| r.report.pass).count();
    let outcome = Outcome::from_counts(passed, out.len());
    let m = Manifest::new("verify", loaded.hash.clone(), outcome, timer.seconds(), VerifyDetails { runs: out });
    write_json(&ctx.path("verify_report.json"), &m)?;
    Ok(outcome)
}
