use growth_flow::PolicyFunction;
use growth_model::{OgEconomy, Technology};
use growth_numerics::{Dopri5, OdeOptions, OdeStatus, Solution};
use growth_og::ValuePair;

use crate::PhaseError;

/// Relative gap `|f - C|/C` below which the consumption drift is replaced
/// by its steady-state limit.
pub const LIMIT_GAP: f64 = 1e-7;

/// Relative gap at which an autonomous run is declared settled and stops.
pub const STOP_GAP: f64 = 1e-9;

/// Largest `|π ln C - ρ(π+δ) W|` accepted inside the limit band. Along
/// equilibrium paths it is of the order of the relative gap.
const NUMERATOR_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Generated by a policy: `C = σ(K)`, `W = w(K)`.
    PolicyDriven,
    /// Integrated from the autonomous `(K, C, W)` system.
    Autonomous,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::PolicyDriven => "policy",
            Provenance::Autonomous => "autonomous",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Spacing of the reported samples, in years.
    pub sample_dt: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, sample_dt: 0.5 }
    }
}

/// Sampled path. `times` is increasing and starts at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub capital: Vec<f64>,
    pub consumption: Vec<f64>,
    pub unborn: Vec<f64>,
    pub provenance: Provenance,
    /// The run ended early because `|f - C| < STOP_GAP · C`.
    pub settled: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Last sample `(t, K, C, W)`.
    pub fn last(&self) -> (f64, f64, f64, f64) {
        let i = self.len() - 1;
        (self.times[i], self.capital[i], self.consumption[i], self.unborn[i])
    }
}

fn sample_times(t_end: f64, dt: f64) -> Vec<f64> {
    let n = (t_end / dt).floor() as usize;
    let mut ts: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    if t_end - ts[n] > 1e-9 * dt {
        ts.push(t_end);
    }
    ts
}

fn check_horizon(t_end: f64, opts: &SimOptions) -> Result<(), PhaseError> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(PhaseError::InvalidArgument(format!("horizon must be positive, got {t_end}")));
    }
    if !(opts.sample_dt > 0.0) {
        return Err(PhaseError::InvalidArgument(format!("sample spacing must be positive, got {}", opts.sample_dt)));
    }
    Ok(())
}

/// `ψ = -(δ-ρ)π/δ - ((δ-ρ)/δ) · C/(f-C) · (π ln C - ρ(π+δ) W)`, the gap
/// between consumption growth and `f'(K) - δ`. Within `LIMIT_GAP` of the
/// steady-state manifold it is replaced by its limit `δ - f'(K)`.
fn psi(econ: &OgEconomy, k: f64, c: f64, w: f64) -> f64 {
    let (d, r, p) = (econ.private_rate, econ.social_rate, econ.death_rate);
    if d == r {
        return 0.0;
    }
    let gap = econ.tech.output(k) - c;
    if gap.abs() < LIMIT_GAP * c {
        return d - econ.tech.marginal(k);
    }
    -(d - r) * p / d - (d - r) / d * c / gap * (p * c.ln() - r * (p + d) * w)
}

/// Integrates `K' = f - C`, `C'/C = f'(K) - δ + ψ`,
/// `W' = -(π (f - C)/C + π ln C - ρ(π+δ) W)/δ` from `(k0, c0, w0)`.
///
/// The run stops early (with `settled`) once `|f - C| < STOP_GAP · C`.
/// A start on the steady-state manifold returns the constant path.
pub fn simulate_autonomous(
    econ: &OgEconomy,
    k0: f64,
    c0: f64,
    w0: f64,
    t_end: f64,
    opts: &SimOptions,
) -> Result<Trajectory, PhaseError> {
    check_horizon(t_end, opts)?;
    if !(k0 > 0.0 && c0 > 0.0 && w0.is_finite()) {
        return Err(PhaseError::InvalidArgument(format!("need K0, C0 > 0, got K0 = {k0}, C0 = {c0}")));
    }
    let tech = econ.tech;
    let gap0 = tech.output(k0) - c0;
    if gap0.abs() < STOP_GAP * c0 {
        return Ok(Trajectory {
            times: vec![0.0],
            capital: vec![k0],
            consumption: vec![c0],
            unborn: vec![w0],
            provenance: Provenance::Autonomous,
            settled: true,
        });
    }
    let (d, r, p) = (econ.private_rate, econ.social_rate, econ.death_rate);
    let side = gap0.signum();
    let rhs = |_: f64, y: &[f64; 3]| -> Option<[f64; 3]> {
        let [k, c, w] = *y;
        if !(k > 0.0 && c > 0.0) {
            return None;
        }
        let gap = tech.output(k) - c;
        // Crossing f = C mid-step would pass through the pole of C/(f - C).
        if gap * side < -LIMIT_GAP * c {
            return None;
        }
        // Inside the limit band the drift is finite only if the numerator
        // of C/(f - C) vanishes with the gap.
        if gap.abs() < LIMIT_GAP * c && (p * c.ln() - r * (p + d) * w).abs() > NUMERATOR_TOL {
            return None;
        }
        let growth = tech.marginal(k) - d + psi(econ, k, c, w);
        Some([gap, c * growth, -(p * gap / c + p * c.ln() - r * (p + d) * w) / d])
    };
    let solver = Dopri5::new(OdeOptions { rtol: opts.rtol, atol: opts.atol, ..OdeOptions::default() });
    let sol = solver
        .integrate_until(rhs, 0.0, [k0, c0, w0], t_end, |_, y| (tech.output(y[0]) - y[1]).abs() < STOP_GAP * y[1]);
    let settled = match sol.status {
        OdeStatus::Completed => false,
        OdeStatus::Stopped => true,
        OdeStatus::DomainEdge | OdeStatus::StepUnderflow => return Err(PhaseError::SingularDrift { t: sol.t_end() }),
        other => return Err(PhaseError::Integration { t: sol.t_end(), reason: format!("{other:?}") }),
    };
    Ok(sampled(&sol, opts.sample_dt, Provenance::Autonomous, settled, |y| (y[0], y[1], y[2])))
}

fn sampled<const N: usize>(
    sol: &Solution<N>,
    dt: f64,
    provenance: Provenance,
    settled: bool,
    split: impl Fn([f64; N]) -> (f64, f64, f64),
) -> Trajectory {
    let ts = sample_times(sol.t_end(), dt);
    let mut out = Trajectory {
        times: Vec::with_capacity(ts.len()),
        capital: Vec::with_capacity(ts.len()),
        consumption: Vec::with_capacity(ts.len()),
        unborn: Vec::with_capacity(ts.len()),
        provenance,
        settled,
    };
    for t in ts {
        let (k, c, w) = split(sol.eval(t));
        out.times.push(t);
        out.capital.push(k);
        out.consumption.push(c);
        out.unborn.push(w);
    }
    out
}

/// Path generated by `policy` from `k0`: `K' = f(K) - σ(K)`, `C = σ(K)`,
/// `W = w(K)` with `w` from `pair`.
pub fn simulate_policy(
    policy: &PolicyFunction,
    pair: &ValuePair,
    tech: &Technology,
    k0: f64,
    t_end: f64,
    opts: &SimOptions,
) -> Result<Trajectory, PhaseError> {
    check_horizon(t_end, opts)?;
    let (lo, hi) = pair.domain();
    if !(lo <= k0 && k0 <= hi && policy.contains(k0)) {
        return Err(PhaseError::InvalidArgument(format!("K0 = {k0} lies outside the policy domain [{lo}, {hi}]")));
    }
    let rhs = |_: f64, y: &[f64; 1]| -> Option<[f64; 1]> {
        let k = y[0];
        (lo <= k && k <= hi).then(|| [tech.output(k) - policy.sigma(k)])
    };
    let solver = Dopri5::new(OdeOptions { rtol: opts.rtol, atol: opts.atol, ..OdeOptions::default() });
    let sol = solver.integrate(rhs, 0.0, [k0], t_end);
    match sol.status {
        OdeStatus::Completed => {}
        OdeStatus::DomainEdge => return Err(PhaseError::DomainExit { t: sol.t_end(), k: sol.y_end()[0], lo, hi }),
        other => return Err(PhaseError::Integration { t: sol.t_end(), reason: format!("{other:?}") }),
    }
    Ok(sampled(&sol, opts.sample_dt, Provenance::PolicyDriven, false, |y| {
        let k = y[0];
        (k, policy.sigma(k), pair.unborn(k))
    }))
}

/// `ψ(t)` at every sample of `traj`.
pub fn psi_path(traj: &Trajectory, econ: &OgEconomy) -> Vec<f64> {
    (0..traj.len()).map(|i| psi(econ, traj.capital[i], traj.consumption[i], traj.unborn[i])).collect()
}
