use growth_flow::{Evaluator, FlowSettings};
use growth_model::OgEconomy;
use growth_og::{solve_value_pair, steady_state_interval, Equilibrium, OmegaRequest, SolveOptions};
use rayon::prelude::*;

use crate::RenegError;

#[derive(Debug, Clone, Copy)]
pub struct SurfaceOptions {
    pub solve: SolveOptions,
    pub flow: FlowSettings,
    /// Each equilibrium is requested on `[min k₀, max k₀]` widened by this
    /// fraction of `k̄` on both sides.
    pub margin: f64,
}

impl Default for SurfaceOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions::default(),
            flow: FlowSettings { rtol: 1e-10, atol: 1e-12, ..FlowSettings::default() },
            margin: 0.02,
        }
    }
}

/// `V(k₀, k̄)` on a grid. Rows are indexed by `k̄`, columns by `k₀`.
/// Entries are `None` where the equilibrium for that `k̄` could not be
/// constructed or its domain does not reach `k₀`.
#[derive(Debug, Clone)]
pub struct ValueSurface {
    pub k_bars: Vec<f64>,
    pub k0s: Vec<f64>,
    pub values: Vec<Vec<Option<f64>>>,
    pub equilibria: Vec<Option<Equilibrium>>,
    /// Reasons for missing rows, keyed by row index.
    pub failures: Vec<(usize, String)>,
}

impl ValueSurface {
    pub fn get(&self, i_bar: usize, i0: usize) -> Option<f64> {
        self.values[i_bar][i0]
    }

    /// Number of evaluated entries.
    pub fn filled(&self) -> usize {
        self.values.iter().flatten().filter(|v| v.is_some()).count()
    }

    /// `(k₀, k̄, V)` for every evaluated entry, rows first.
    pub fn entries(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.filled());
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if let Some(v) = v {
                    out.push((self.k0s[j], self.k_bars[i], *v));
                }
            }
        }
        out
    }
}

fn check_inside(econ: &OgEconomy, k_bar: f64) -> Result<(), RenegError> {
    let iv = steady_state_interval(econ)?;
    if !iv.contains_interior(k_bar) {
        return Err(RenegError::OutsideInterval { k_bar, lo: iv.k_lo, hi: iv.k_hi });
    }
    Ok(())
}

fn solve_covering(
    econ: &OgEconomy,
    k_bar: f64,
    lo: f64,
    hi: f64,
    opts: &SurfaceOptions,
) -> Result<Equilibrium, RenegError> {
    check_inside(econ, k_bar)?;
    let pad = opts.margin * k_bar;
    let req = OmegaRequest { lo: lo.min(k_bar) - pad, hi: hi.max(k_bar) + pad };
    Ok(solve_value_pair(econ, k_bar, req, &opts.solve)?)
}

fn value_at(econ: &OgEconomy, eq: &Equilibrium, k0: f64, flow: FlowSettings) -> Result<Option<f64>, RenegError> {
    let (lo, hi) = eq.pair.domain();
    if !(lo <= k0 && k0 <= hi) {
        return Ok(None);
    }
    let ev = Evaluator::new(&eq.policy, &econ.tech, econ.utility).with_settings(flow);
    Ok(Some(ev.value(&econ.kernel(), k0)?))
}

/// Solves one equilibrium per `k̄` (in parallel) and evaluates the
/// discounted utility of its flow from every `k₀` in reach.
pub fn value_surface(
    econ: &OgEconomy,
    k_bars: &[f64],
    k0s: &[f64],
    opts: &SurfaceOptions,
) -> Result<ValueSurface, RenegError> {
    if k_bars.is_empty() || k0s.is_empty() {
        return Err(RenegError::InvalidArgument("empty grid".into()));
    }
    let lo = k0s.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = k0s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    type Row = (Equilibrium, Vec<Option<f64>>);
    let rows: Vec<Result<Row, RenegError>> = k_bars
        .par_iter()
        .map(|&kb| {
            let eq = solve_covering(econ, kb, lo, hi, opts)?;
            let row = k0s.iter().map(|&k0| value_at(econ, &eq, k0, opts.flow)).collect::<Result<Vec<_>, _>>()?;
            Ok((eq, row))
        })
        .collect();
    let mut out = ValueSurface {
        k_bars: k_bars.to_vec(),
        k0s: k0s.to_vec(),
        values: Vec::with_capacity(rows.len()),
        equilibria: Vec::with_capacity(rows.len()),
        failures: Vec::new(),
    };
    for (i, row) in rows.into_iter().enumerate() {
        match row {
            Ok((eq, vals)) => {
                out.values.push(vals);
                out.equilibria.push(Some(eq));
            }
            Err(e) => {
                out.values.push(vec![None; k0s.len()]);
                out.equilibria.push(None);
                out.failures.push((i, e.to_string()));
            }
        }
    }
    Ok(out)
}

/// Centered difference `(V(k̄, k̄+h) - V(k̄, k̄-h)) / 2h` with both
/// neighbouring equilibria solved on domains containing `k̄`.
pub fn fd_renegotiation_derivative(
    econ: &OgEconomy,
    k_bar: f64,
    step: f64,
    opts: &SurfaceOptions,
) -> Result<f64, RenegError> {
    if !(step > 0.0) {
        return Err(RenegError::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let v = |kb: f64| -> Result<f64, RenegError> {
        let eq = solve_covering(econ, kb, k_bar, k_bar, opts)?;
        value_at(econ, &eq, k_bar, opts.flow)?
            .ok_or_else(|| RenegError::InvalidArgument(format!("equilibrium for {kb} does not reach {k_bar}")))
    };
    let (up, down) = rayon::join(|| v(k_bar + step), || v(k_bar - step));
    Ok((up? - down?) / (2.0 * step))
}
