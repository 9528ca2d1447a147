use growth_model::{OgEconomy, Technology};
use growth_numerics::series;

use crate::interval::steady_state_interval;
use crate::system::{PointState, Rates};
use crate::OgError;

/// Value pair and first derivatives at the steady state, plus the second
/// derivatives used for a quadratic start-up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorSeed {
    pub k_bar: f64,
    pub v: f64,
    pub w: f64,
    pub vp: f64,
    pub wp: f64,
    pub vpp: f64,
    pub wpp: f64,
    /// `f'(k̄) + v''(k̄)/v'(k̄)²`; negative iff `k̄` attracts the flow.
    pub stability: f64,
    /// `δ = ρ`: the system uncouples.
    pub time_consistent: bool,
}

impl TaylorSeed {
    /// Quadratic approximation `(v, w)` at `k̄ + z`.
    pub fn at(&self, z: f64) -> (f64, f64) {
        (self.v + self.vp * z + 0.5 * self.vpp * z * z, self.w + self.wp * z + 0.5 * self.wpp * z * z)
    }
}

/// Closed-form `f'(k̄) + v''(k̄)/v'(k̄)²` for `δ > ρ`:
/// `(ρ(δ+π) - (ρ+π) f'(k̄)) / (δ - f'(k̄))`. Defined for any `k̄` with
/// `f'(k̄) ≠ δ`; positive values mean `k̄` repels.
pub fn stability_closed_form(econ: &OgEconomy, k_bar: f64) -> f64 {
    let r = Rates::from(econ);
    let fp = econ.tech.marginal(k_bar);
    if econ.is_time_consistent() {
        return saddle_rate(r, &econ.tech, k_bar);
    }
    (r.rho * (r.delta + r.pi) - (r.rho + r.pi) * fp) / (r.delta - fp)
}

/// Stable root `f x'(k̄)` of the classical saddle when `δ = ρ`.
fn saddle_rate(r: Rates, tech: &Technology, k_bar: f64) -> f64 {
    let f = tech.output(k_bar);
    let fpp = tech.second(k_bar);
    0.5 * (r.delta - (r.delta * r.delta - 4.0 * f * fpp).sqrt())
}

pub fn taylor_seed(econ: &OgEconomy, k_bar: f64) -> Result<TaylorSeed, OgError> {
    let iv = steady_state_interval(econ)?;
    let inadmissible = || OgError::InadmissibleSteadyState { k_bar, lo: iv.k_lo, hi: iv.k_hi };
    if econ.is_time_consistent() {
        if (k_bar - iv.k_lo).abs() > 1e-9 * (1.0 + iv.k_lo) {
            return Err(inadmissible());
        }
    } else if !iv.contains_interior(k_bar) {
        return Err(inadmissible());
    }
    let s = SeriesExpansion::build(econ, k_bar, 3)?;
    Ok(TaylorSeed {
        k_bar,
        v: s.v[0],
        w: s.w[0],
        vp: s.v[1],
        wp: s.w[1],
        vpp: 2.0 * s.v[2],
        wpp: 2.0 * s.w[2],
        stability: s.tech.output(k_bar) * s.x[1],
        time_consistent: econ.is_time_consistent(),
    })
}

/// Formal power series of `(v, w, x)` in `z = k - k̄`.
///
/// When `δ > ρ` the series diverges (its coefficients grow factorially) and
/// is used with optimal truncation; the truncation error at distance `d` is
/// exponentially small in `1/d`.
#[derive(Debug, Clone)]
pub struct SeriesExpansion {
    pub k_bar: f64,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub x: Vec<f64>,
    tech: Technology,
    vd: Vec<f64>,
    wd: Vec<f64>,
    xd: Vec<f64>,
}

impl SeriesExpansion {
    /// Up to `n` coefficients of each series; fewer if they overflow.
    pub fn build(econ: &OgEconomy, k_bar: f64, n: usize) -> Result<Self, OgError> {
        if n < 3 {
            return Err(OgError::InvalidArgument("series needs at least three terms".into()));
        }
        let r = Rates::from(econ);
        let tech = econ.tech;
        let f = tech.taylor(k_bar, n + 2);
        let lf = series::ln(&f);
        let f0 = f[0];
        let len = n + 2;
        let mut v = vec![0.0; len];
        let mut w = vec![0.0; len];
        let mut x = vec![0.0; len];
        // q = x/(1+x), lam = ln(1+x), g = f q.
        let mut q = vec![0.0; len];
        let mut lam = vec![0.0; len];
        let mut g = vec![0.0; len];
        v[0] = econ.steady_value(k_bar);
        w[0] = econ.steady_unborn(k_bar);
        v[1] = 1.0 / f0;

        let q_known = |n: usize, q: &[f64], x: &[f64]| -> f64 { -(1..n).map(|j| q[j] * x[n - j]).sum::<f64>() };
        let lam_known = |n: usize, lam: &[f64], x: &[f64]| -> f64 {
            -(1..n).map(|j| j as f64 * lam[j] * x[n - j]).sum::<f64>() / n as f64
        };
        let g_tail = |n: usize, q: &[f64]| -> f64 { (1..n).map(|j| f[j] * q[n - j]).sum::<f64>() };
        let next_v = |n: usize, v: &[f64], xn: f64| -> f64 {
            let s: f64 = (1..=n).map(|j| f[j] * (n - j + 1) as f64 * v[n - j + 1]).sum();
            (xn - s) / ((n + 1) as f64 * f0)
        };
        let mut usable = n;

        if econ.is_time_consistent() {
            let x1 = saddle_rate(r, &tech, k_bar) / f0;
            x[1] = x1;
            q[1] = x1;
            lam[1] = x1;
            g[1] = f0 * x1;
            v[2] = next_v(1, &v, x1);
            for m in 2..n {
                // Order m+1 of the first equation fixes x_m: it enters as x_1 x_m.
                let lam_minus = lam_known(m, &lam, &x);
                let r1 = ((2..m).map(|j| j as f64 * lam[j] * x[m + 1 - j]).sum::<f64>() + m as f64 * lam_minus * x1)
                    / (m + 1) as f64;
                let s: f64 = (1..=m).map(|j| f[j] * (m - j + 1) as f64 * v[m - j + 1]).sum();
                let scale = r.delta / ((m + 1) as f64 * f0);
                let xm = (-r1 - scale * s - lf[m + 1]) / (x1 - scale);
                if !xm.is_finite() || xm.abs() > 1e250 {
                    usable = m;
                    break;
                }
                x[m] = xm;
                lam[m] = xm + lam_minus;
                q[m] = xm + q_known(m, &q, &x);
                g[m] = f0 * q[m] + g_tail(m, &q);
                v[m + 1] = next_v(m, &v, xm);
            }
            w[1] = -r.pi * v[1] / (g[1] - r.rho - r.pi);
            for m in 2..usable {
                let s: f64 = (2..=m).map(|j| g[j] * (m - j + 1) as f64 * w[m - j + 1]).sum();
                w[m] = (-r.pi * v[m] - s) / (m as f64 * g[1] - r.rho - r.pi);
            }
        } else {
            let dr = r.delta - r.rho;
            for m in 1..n {
                // [x - ln(1+x)]_m only involves x_1..x_{m-1}.
                let xl: f64 = (1..m).map(|j| j as f64 * lam[j] * x[m - j]).sum::<f64>() / m as f64;
                w[m] = (r.delta * v[m] - lf[m] - xl) / dr;
                // Order m of the second equation is linear in x_m through g_m w_1.
                let rhs = -r.pi * v[m] + (r.rho + r.pi) * w[m];
                let qm_minus = q_known(m, &q, &x);
                let gm_minus = f0 * qm_minus + g_tail(m, &q);
                let known: f64 =
                    (1..m).map(|j| g[j] * (m - j + 1) as f64 * w[m - j + 1]).sum::<f64>() + gm_minus * w[1];
                let xm = (rhs - known) / (f0 * w[1]);
                let vn = next_v(m, &v, xm);
                if !xm.is_finite() || !vn.is_finite() || xm.abs() > 1e250 || w[m].abs() > 1e250 {
                    usable = m;
                    break;
                }
                x[m] = xm;
                q[m] = xm + qm_minus;
                g[m] = f0 * q[m] + g_tail(m, &q);
                lam[m] = xm + lam_known(m, &lam, &x);
                v[m + 1] = vn;
            }
        }
        v.truncate(usable);
        w.truncate(usable);
        x.truncate(usable);
        let vd = series::deriv(&v);
        let wd = series::deriv(&w);
        let xd = series::deriv(&x);
        Ok(Self { k_bar, v, w, x, tech, vd, wd, xd })
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    fn term(&self, n: usize, d: f64) -> f64 {
        let a = (self.v[n].abs() / (1.0 + self.v[0].abs()))
            .max(self.w[n].abs() / (1.0 + self.w[0].abs()))
            .max(self.x[n].abs());
        a * d.powi(n as i32)
    }

    /// Smallest term from order 2 on at distance `d`, and its order.
    fn smallest_term(&self, d: f64) -> (f64, usize) {
        (2..self.len())
            .map(|n| (self.term(n, d), n))
            .fold((f64::INFINITY, self.len()), |a, b| if b.0 < a.0 { b } else { a })
    }

    /// Largest `d ≤ d_max` whose optimally truncated error estimate is below
    /// `tol`, with the number of terms to keep there.
    pub fn reliable_radius(&self, tol: f64, d_max: f64) -> (f64, usize) {
        if self.smallest_term(d_max).0 <= tol {
            return (d_max, self.smallest_term(d_max).1);
        }
        let (mut lo, mut hi) = (0.0, d_max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.smallest_term(mid).0 <= tol {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }
        let n = self.smallest_term(lo).1.max(3);
        (lo, n)
    }

    /// State at `k̄ + z` from the first `terms` coefficients.
    pub fn state(&self, z: f64, terms: usize) -> PointState {
        let k = self.k_bar + z;
        let v = series::eval(&self.v, z, terms);
        let w = series::eval(&self.w, z, terms);
        let vp = series::eval(&self.vd, z, terms - 1);
        let wp = series::eval(&self.wd, z, terms - 1);
        let x = series::eval(&self.x, z, terms);
        let xp = series::eval(&self.xd, z, terms - 1);
        let f = self.tech.output(k);
        let sigma = f / (1.0 + x);
        let sigma_p = self.tech.marginal(k) / (1.0 + x) - f * xp / ((1.0 + x) * (1.0 + x));
        PointState { k, v, w, vp, wp, x, sigma, sigma_p }
    }
}
