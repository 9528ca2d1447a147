use anyhow::Result;
use growth_flow::Evaluator;
use growth_og::{stability_closed_form, stability_test, steady_state_interval, SolveOptions};
use growth_reneg::{fd_renegotiation_derivative, lrp_select, renegotiation_derivative, SurfaceOptions};
use rayon::prelude::*;
use serde::Serialize;

use super::{solve_at, Ctx, Timer};
use crate::output::{num, opt, write_csv, write_json, Manifest, Outcome};
use crate::scenario::{Loaded, Scenario};

pub const SURFACE_COLUMNS: [&str; 11] = [
    "k_bar",
    "fraction",
    "status",
    "lrp",
    "marginal_product",
    "v_diagonal",
    "v_closed_form",
    "derivative",
    "derivative_fd",
    "stability_closed_form",
    "stability_numerical",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Interior,
    Outside,
    Lrp,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceRow {
    pub k_bar: f64,
    pub fraction: f64,
    pub status: String,
    pub lrp: bool,
    pub marginal_product: f64,
    pub v_diagonal: Option<f64>,
    pub v_closed_form: f64,
    pub derivative: f64,
    pub derivative_fd: Option<f64>,
    pub stability_closed_form: f64,
    pub stability_numerical: Option<f64>,
}

impl SurfaceRow {
    fn csv(&self) -> Vec<String> {
        vec![
            num(self.k_bar),
            num(self.fraction),
            self.status.clone(),
            u8::from(self.lrp).to_string(),
            num(self.marginal_product),
            opt(self.v_diagonal),
            num(self.v_closed_form),
            num(self.derivative),
            opt(self.derivative_fd),
            num(self.stability_closed_form),
            opt(self.stability_numerical),
        ]
    }
}

#[derive(Debug, Serialize)]
pub struct SweepDetails {
    pub interior_rows: usize,
    pub interior_ok: usize,
    pub lrp_k_bar: f64,
    pub failures: Vec<(f64, String)>,
}

/// Centred difference of the diagonal value in `k̄`. Near the lower end of
/// the interval the neighbouring equilibria reach only a short way past
/// their own steady states, so the step shrinks and the knots refine until
/// both reach `k̄`.
fn fd_derivative(s: &Scenario, k_bar: f64, opts: SurfaceOptions) -> Result<f64> {
    let mut last = None;
    for (shrink, knots) in [(1.0, 1.0), (0.25, 1e-2), (1.0 / 16.0, 1e-4), (1.0 / 256.0, 1e-4), (1.0 / 4096.0, 1e-4)] {
        let o = SurfaceOptions { solve: SolveOptions { knot_min: opts.solve.knot_min * knots, ..opts.solve }, ..opts };
        match fd_renegotiation_derivative(&s.economy()?, k_bar, shrink * s.sweep.fd_step * k_bar, &o) {
            Ok(d) => return Ok(d),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt").into())
}

fn row(s: &Scenario, k_bar: f64, fraction: f64, kind: Kind) -> (SurfaceRow, Option<String>) {
    let econ = s.economy().expect("validated scenario");
    let mut r = SurfaceRow {
        k_bar,
        fraction,
        status: match kind {
            Kind::Interior => "ok",
            Kind::Outside => "inadmissible",
            Kind::Lrp => "lrp_endpoint",
        }
        .into(),
        lrp: kind == Kind::Lrp,
        marginal_product: econ.tech.marginal(k_bar),
        v_diagonal: None,
        v_closed_form: econ.steady_value(k_bar),
        derivative: renegotiation_derivative(&econ, k_bar),
        derivative_fd: None,
        stability_closed_form: stability_closed_form(&econ, k_bar),
        stability_numerical: None,
    };
    if kind != Kind::Interior {
        return (r, None);
    }
    let mut attempt = || -> Result<()> {
        let eq = solve_at(s, &econ, k_bar, None)?;
        let opts = SurfaceOptions { solve: s.solve_options(), ..SurfaceOptions::default() };
        let ev = Evaluator::new(&eq.policy, &econ.tech, econ.utility).with_settings(opts.flow);
        r.v_diagonal = Some(ev.value(&econ.kernel(), k_bar)?);
        r.stability_numerical = Some(match stability_test(&econ, &eq.pair) {
            Ok(st) => st.numerical,
            Err(growth_og::OgError::Diagnostics { numerical, .. }) => numerical,
            Err(e) => return Err(e.into()),
        });
        r.derivative_fd = Some(fd_derivative(s, k_bar, opts)?);
        Ok(())
    };
    match attempt() {
        Ok(()) => (r, None),
        Err(e) => {
            r.status = "failed".into();
            (r, Some(format!("{e:#}")))
        }
    }
}

pub fn run(ctx: &Ctx, loaded: &Loaded) -> Result<Outcome> {
    let timer = Timer::start();
    let s = &loaded.scenario;
    let econ = s.economy()?;
    let iv = steady_state_interval(&econ)?;
    anyhow::ensure!(!iv.is_degenerate(), "the steady-state interval is a single point; nothing to sweep");
    let n = s.sweep.points;
    let mut points: Vec<(f64, Kind)> = (0..n).map(|i| ((i as f64 + 0.5) / n as f64, Kind::Interior)).collect();
    points.extend(s.sweep.outside.iter().map(|&f| (f, Kind::Outside)));
    points.push((1.0, Kind::Lrp));
    let lrp = lrp_select(&econ)?;

    let results: Vec<(SurfaceRow, Option<String>)> = points
        .par_iter()
        .map(|&(f, kind)| {
            let k = if kind == Kind::Lrp { lrp } else { iv.at(f) };
            row(s, k, f, kind)
        })
        .collect();
    let mut results = results;
    results.sort_by(|a, b| a.0.k_bar.total_cmp(&b.0.k_bar));

    let rows: Vec<Vec<String>> = results.iter().map(|(r, _)| r.csv()).collect();
    write_csv(&ctx.path("surface.csv"), &SURFACE_COLUMNS, &rows)?;

    let interior: Vec<&SurfaceRow> =
        results.iter().map(|(r, _)| r).filter(|r| r.fraction > 0.0 && r.fraction < 1.0 && !r.lrp).collect();
    let ok = interior.iter().filter(|r| r.status == "ok").count();
    let failures = results.iter().filter_map(|(r, e)| e.clone().map(|e| (r.k_bar, e))).collect();
    let outcome = Outcome::from_counts(ok, interior.len());
    let details = SweepDetails { interior_rows: interior.len(), interior_ok: ok, lrp_k_bar: lrp, failures };
    write_json(
        &ctx.path("sweep_manifest.json"),
        &Manifest::new("sweep", loaded.hash.clone(), outcome, timer.seconds(), details),
    )?;
    Ok(outcome)
}
