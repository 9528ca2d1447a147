use growth_flow::{CandidateValue, PolicyFunction};
use growth_model::OgEconomy;
use growth_numerics::{CubicHermite, Dopri5, OdeOptions, OdeStatus, Solution};

use crate::branch::Branch;
use crate::seed::{taylor_seed, SeriesExpansion, TaylorSeed};
use crate::system::{point_state, value_rhs, PointState, Rates};
use crate::OgError;

/// Fewest knots each side of `k̄` must keep for the policy to be usable.
const MIN_SIDE_KNOTS: usize = 4;

/// Capital interval on which a solution is requested.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaRequest {
    pub lo: f64,
    pub hi: f64,
}

impl OmegaRequest {
    /// `[k̄ (1 - frac), k̄ (1 + frac)]`.
    pub fn around(k_bar: f64, frac: f64) -> Self {
        Self { lo: k_bar * (1.0 - frac), hi: k_bar * (1.0 + frac) }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Initial start-up offset is `eps_factor · (1 + k̄)`.
    pub eps_factor: f64,
    /// Relative agreement required between offsets `ε` and `ε/2`.
    pub agree_tol: f64,
    pub max_halvings: usize,
    pub rtol: f64,
    pub atol: f64,
    /// Tolerance for the integration leaving the series region on the side
    /// where perturbations grow.
    pub seam_rtol: f64,
    pub series_terms: usize,
    /// Relative error budget for the optimally truncated series.
    pub series_tol: f64,
    /// Knot spacing bounds, relative to `1 + k̄`.
    pub knot_min: f64,
    pub knot_max: f64,
    /// Knot spacing grows geometrically away from `k̄` at this rate.
    pub knot_growth: f64,
    /// Always start the left branch from the quadratic seed, even where the
    /// series reaches further.
    pub quadratic_start: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            eps_factor: 1e-4,
            agree_tol: 1e-7,
            max_halvings: 8,
            rtol: 1e-11,
            atol: 1e-12,
            seam_rtol: 1e-13,
            series_terms: 160,
            series_tol: 1e-12,
            knot_min: 2e-5,
            knot_max: 5e-3,
            knot_growth: 0.1,
            quadratic_start: false,
        }
    }
}

/// Planner value `v` and unborn value `w` on a knot grid, with exact slopes.
#[derive(Debug, Clone)]
pub struct ValuePair {
    pub k_bar: f64,
    pub ks: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub vp: Vec<f64>,
    pub wp: Vec<f64>,
    pub x: Vec<f64>,
    pub sigma: Vec<f64>,
    pub sigma_p: Vec<f64>,
}

impl ValuePair {
    fn from_states(k_bar: f64, states: &[PointState]) -> Self {
        let col = |f: fn(&PointState) -> f64| states.iter().map(f).collect::<Vec<_>>();
        Self {
            k_bar,
            ks: col(|p| p.k),
            v: col(|p| p.v),
            w: col(|p| p.w),
            vp: col(|p| p.vp),
            wp: col(|p| p.wp),
            x: col(|p| p.x),
            sigma: col(|p| p.sigma),
            sigma_p: col(|p| p.sigma_p),
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.ks[0], self.ks[self.ks.len() - 1])
    }

    /// `v` as a candidate value for the equilibrium certificates.
    pub fn candidate_value(&self) -> CandidateValue {
        CandidateValue::from_knots(self.ks.clone(), self.v.clone(), self.vp.clone())
    }

    fn unborn_interpolant(&self) -> CubicHermite {
        CubicHermite::new(self.ks.clone(), self.w.clone(), self.wp.clone())
    }

    pub fn value(&self, k: f64) -> f64 {
        self.candidate_value().value(k)
    }

    pub fn unborn(&self, k: f64) -> f64 {
        self.unborn_interpolant().eval(k)
    }

    pub fn unborn_deriv(&self, k: f64) -> f64 {
        self.unborn_interpolant().deriv(k)
    }

    /// Index of the knot at the steady state.
    pub fn steady_index(&self) -> usize {
        self.ks.iter().position(|k| *k == self.k_bar).expect("steady state is a knot")
    }
}

/// `(v(k) - w(k), w(k))`: welfare of the living cohorts and of the unborn.
pub fn welfare_split(pair: &ValuePair, k: f64) -> (f64, f64) {
    let v = pair.value(k);
    let w = pair.unborn(k);
    (v - w, w)
}

/// How the left branch was started.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeftStart {
    /// From the truncated series at `k̄ - offset`.
    Series { offset: f64 },
    /// From the quadratic seed at `k̄ - eps`, after `halvings` halvings of
    /// the offset brought two runs within `discrepancy` of each other.
    Quadratic { eps: f64, halvings: usize, discrepancy: f64 },
}

/// Diagnostics from one construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub k_bar: f64,
    pub requested: OmegaRequest,
    /// Reachable domain actually covered.
    pub omega: (f64, f64),
    pub left_start: LeftStart,
    pub series_terms: usize,
    /// Distance from `k̄` within which knots come from the truncated series.
    pub series_radius: f64,
    /// Where integration takes over from the series on the right, if it does.
    pub seam: Option<f64>,
    pub left_stop: Option<String>,
    pub right_stop: Option<String>,
    pub ode_steps: usize,
    pub time_consistent: bool,
}

/// A constructed equilibrium: value pair, policy and diagnostics.
#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub seed: TaylorSeed,
    pub pair: ValuePair,
    pub policy: PolicyFunction,
    pub report: SolveReport,
}

fn integrate_side(
    econ: &OgEconomy,
    k0: f64,
    y0: [f64; 2],
    k1: f64,
    branch: Branch,
    rtol: f64,
    atol: f64,
) -> Solution<2> {
    let r = Rates::from(econ);
    let tech = econ.tech;
    let opts = OdeOptions { rtol, atol, max_steps: 5_000_000, ..OdeOptions::default() };
    Dopri5::new(opts).integrate(
        move |k, y| value_rhs(r, &tech, k, y[0], y[1], branch).map(|(vp, wp, _)| [vp, wp]),
        k0,
        y0,
        k1,
    )
}

fn stop_reason(sol: &Solution<2>) -> Option<String> {
    match sol.status {
        OdeStatus::Completed => None,
        s => Some(format!("{s:?} at k = {}", sol.t_end())),
    }
}

/// Largest relative gap between two left-side runs at shared sample points.
fn discrepancy(a: &Solution<2>, b: &Solution<2>, k_bar: f64, lo: f64, skip: f64) -> f64 {
    let far = a.t_end().max(b.t_end()).max(lo);
    let near = k_bar - skip;
    if near <= far {
        return 0.0;
    }
    (0..=16)
        .map(|j| {
            let k = near + (far - near) * j as f64 / 16.0;
            let (ya, yb) = (a.eval(k), b.eval(k));
            ((ya[0] - yb[0]).abs() / (1.0 + ya[0].abs())).max((ya[1] - yb[1]).abs() / (1.0 + ya[1].abs()))
        })
        .fold(0.0, f64::max)
}

/// Distances from `k̄` to the knots on one side, ending exactly at `len`.
fn knot_offsets(len: f64, h_min: f64, h_max: f64, growth: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut d = 0.0;
    while d < len {
        d += (growth * d).clamp(h_min, h_max);
        if d > len - 0.5 * h_min {
            d = len;
        }
        out.push(d);
    }
    out
}

/// Builds the equilibrium whose capital converges to `k_bar`.
///
/// Left of `k̄` (where consumption falls short of output) deviations from
/// the equilibrium die out as the system is integrated away from `k̄`, so
/// the solution is started near `k̄` from the series or a quadratic seed. Right of
/// `k̄` deviations grow like `exp(c/|k - k̄|)`: there the optimally truncated
/// series supplies the solution out to its reliable radius and integration
/// continues from that seam.
pub fn solve_value_pair(
    econ: &OgEconomy,
    k_bar: f64,
    omega: OmegaRequest,
    opts: &SolveOptions,
) -> Result<Equilibrium, OgError> {
    if !(omega.lo < k_bar && k_bar < omega.hi && omega.lo > 0.0) {
        return Err(OgError::InvalidArgument(format!(
            "requested domain [{}, {}] must contain k̄ = {k_bar} in its interior",
            omega.lo, omega.hi
        )));
    }
    let seed = taylor_seed(econ, k_bar)?;
    let r = Rates::from(econ);
    let tech = econ.tech;
    // Continuity of v' fixes the branch: x = f v' - 1 has the sign of v''(k̄)(k - k̄).
    let side_branch = |z: f64| if seed.vpp * z > 0.0 { Branch::Above } else { Branch::Below };
    let (left_branch, right_branch) = (side_branch(-1.0), side_branch(1.0));

    let series = SeriesExpansion::build(econ, k_bar, opts.series_terms)?;
    let d_max = (k_bar - omega.lo).max(omega.hi - k_bar);
    let (radius, terms) = series.reliable_radius(opts.series_tol, d_max);

    // Left side. Step sizes there are limited to about d²/c at distance d,
    // so starting at k̄ - ε costs ~c/ε steps; when the series is reliable
    // beyond ε it supplies the start instead.
    let scale = 1.0 + k_bar;
    let eps0 = opts.eps_factor * scale;
    let left_len = k_bar - omega.lo;
    let (left, left_start) = if radius > eps0 && !opts.quadratic_start {
        let d = radius.min(left_len);
        let p = series.state(-d, terms);
        let sol = integrate_side(econ, k_bar - d, [p.v, p.w], omega.lo, left_branch, opts.rtol, opts.atol);
        (sol, LeftStart::Series { offset: d })
    } else {
        // Quadratic seed at k̄ - ε, halving ε until two runs agree.
        let run = |eps: f64| {
            let (v, w) = seed.at(-eps);
            integrate_side(econ, k_bar - eps, [v, w], omega.lo, left_branch, opts.rtol, opts.atol)
        };
        let mut eps = eps0;
        let mut left = run(eps);
        let mut halvings = 0;
        loop {
            let finer = run(0.5 * eps);
            let disc = discrepancy(&left, &finer, k_bar, omega.lo, 10.0 * eps);
            left = finer;
            eps *= 0.5;
            if disc <= opts.agree_tol {
                break (left, LeftStart::Quadratic { eps, halvings, discrepancy: disc });
            }
            halvings += 1;
            if halvings >= opts.max_halvings {
                return Err(OgError::SeedDisagreement { discrepancy: disc, halvings });
            }
        }
    };
    let eps = match left_start {
        LeftStart::Quadratic { eps, .. } => eps,
        LeftStart::Series { .. } => eps0,
    };
    let mut ode_steps = left.steps.len();

    // Right side: series out to its reliable radius, then integrate.
    let right_len = omega.hi - k_bar;
    let (right, seam) = if radius < right_len {
        let p = series.state(radius, terms);
        let sol = integrate_side(
            econ,
            k_bar + radius,
            [p.v, p.w],
            omega.hi,
            right_branch,
            opts.seam_rtol,
            opts.atol.min(opts.seam_rtol),
        );
        ode_steps += sol.steps.len();
        (Some(sol), Some(k_bar + radius))
    } else {
        (None, None)
    };

    let left_reach = left.t_end().max(omega.lo);
    let right_reach = right.as_ref().map_or(omega.hi, |s| s.t_end().min(omega.hi));
    let h_min = opts.knot_min * scale;
    let h_max = opts.knot_max * scale;
    let series_zone = radius.max(eps);

    let state_at = |z: f64| -> Option<PointState> {
        let k = k_bar + z;
        if z.abs() <= series_zone {
            return Some(series.state(z, terms));
        }
        let (sol, branch) = if z < 0.0 { (&left, left_branch) } else { (right.as_ref()?, right_branch) };
        let [v, w] = sol.eval(k);
        point_state(r, &tech, k, v, w, branch)
    };

    // Walk outward and stop at the first knot where the policy stops being
    // an increasing, convergent rule.
    let collect = |len: f64, sign: f64| -> (Vec<PointState>, Option<String>) {
        let mut out = Vec::new();
        for d in knot_offsets(len, h_min, h_max, opts.knot_growth) {
            let Some(p) = state_at(sign * d) else {
                return (out, Some(format!("no branch solution at k = {}", k_bar + sign * d)));
            };
            let converges = p.x * sign * seed.vpp > 0.0;
            let ok = p.sigma > 0.0 && p.sigma_p > 0.0 && p.vp > 0.0 && converges;
            if !ok || ![p.v, p.w, p.vp, p.wp, p.sigma, p.sigma_p].iter().all(|x| x.is_finite()) {
                return (out, Some(format!("policy not monotone convergent at k = {}", p.k)));
            }
            out.push(p);
        }
        (out, None)
    };
    let (mut lefts, left_cut) = collect(k_bar - left_reach, -1.0);
    let (rights, right_cut) = collect(right_reach - k_bar, 1.0);
    let reach = |pts: &[PointState]| pts.last().map_or(0.0, |p| (p.k - k_bar).abs());
    if lefts.len() < MIN_SIDE_KNOTS || rights.len() < MIN_SIDE_KNOTS {
        return Err(OgError::PolicyRejected(format!(
            "reachable domain [{}, {}] too small around k̄ = {k_bar}",
            k_bar - reach(&lefts),
            k_bar + reach(&rights)
        )));
    }
    lefts.reverse();
    let mut states = lefts;
    states.push(series.state(0.0, terms));
    states.extend(rights);
    let pair = ValuePair::from_states(k_bar, &states);

    let policy = PolicyFunction::from_knots(pair.ks.clone(), pair.sigma.clone(), pair.sigma_p.clone(), Some(k_bar))?;
    let report = SolveReport {
        k_bar,
        requested: omega,
        omega: pair.domain(),
        left_start,
        series_terms: terms,
        series_radius: radius,
        seam,
        left_stop: left_cut.or_else(|| stop_reason(&left)),
        right_stop: right_cut.or_else(|| right.as_ref().and_then(stop_reason)),
        ode_steps,
        time_consistent: seed.time_consistent,
    };
    Ok(Equilibrium { seed, pair, policy, report })
}
