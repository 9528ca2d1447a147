//! Dormand–Prince 5(4) integrator with Hairer's continuous extension.
//!
//! The right-hand side may refuse a state by returning `None`; the step is
//! then retried with a smaller size. This lets callers encode domain
//! constraints (for example a logarithm argument that must stay positive)
//! without the integrator ever evaluating outside the domain.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Tolerances and limits for [`Dopri5`].
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step magnitude; chosen automatically when `None`.
    pub h0: Option<f64>,
    /// Upper bound on the step magnitude.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, h0: None, h_max: f64::INFINITY, max_steps: 1_000_000 }
    }
}

/// Why an integration run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeStatus {
    /// Reached the requested end point.
    Completed,
    /// The caller's stop predicate fired after an accepted step.
    Stopped,
    /// The right-hand side kept rejecting states until the step underflowed.
    DomainEdge,
    /// Step size underflow caused by error control.
    StepUnderflow,
    MaxSteps,
}

/// One accepted step with its continuous-extension coefficients.
#[derive(Debug, Clone)]
pub struct Step<const N: usize> {
    pub t0: f64,
    /// Signed step length.
    pub h: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    pub f0: [f64; N],
    pub f1: [f64; N],
    rc: [[f64; N]; 4],
}

impl<const N: usize> Step<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Fourth-order dense output at `t` inside the step.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] =
                self.y0[i] + th * (self.rc[0][i] + th1 * (self.rc[1][i] + th * (self.rc[2][i] + th1 * self.rc[3][i])));
        }
        out
    }
}

/// Accepted steps of one run, ordered in the direction of integration.
#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub steps: Vec<Step<N>>,
    pub status: OdeStatus,
    pub t_start: f64,
    pub y_start: [f64; N],
    pub rejected: usize,
    pub rhs_evals: usize,
}

impl<const N: usize> Solution<N> {
    pub fn t_end(&self) -> f64 {
        self.steps.last().map_or(self.t_start, |s| s.t1())
    }

    pub fn y_end(&self) -> [f64; N] {
        self.steps.last().map_or(self.y_start, |s| s.y1)
    }

    fn direction(&self) -> f64 {
        self.steps.first().map_or(1.0, |s| s.h.signum())
    }

    /// Dense evaluation; `t` is clamped to the covered interval.
    pub fn eval(&self, t: f64) -> [f64; N] {
        if self.steps.is_empty() {
            return self.y_start;
        }
        let d = self.direction();
        let tt = d * t;
        let i = self.steps.partition_point(|s| d * s.t1() < tt);
        let s = &self.steps[i.min(self.steps.len() - 1)];
        let lo = s.t0.min(s.t1());
        let hi = s.t0.max(s.t1());
        s.eval(t.clamp(lo, hi))
    }

    /// Appends another run that starts where this one ends.
    pub fn extend(&mut self, other: Solution<N>) {
        self.steps.extend(other.steps);
        self.status = other.status;
        self.rejected += other.rejected;
        self.rhs_evals += other.rhs_evals;
    }
}

/// Explicit embedded Runge–Kutta pair of orders 5 and 4.
#[derive(Debug, Clone, Copy, Default)]
pub struct Dopri5 {
    pub opts: OdeOptions,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        let hc = h * c;
        for i in 0..N {
            out[i] += hc * k[i];
        }
    }
    out
}

impl Dopri5 {
    pub fn new(opts: OdeOptions) -> Self {
        Self { opts }
    }

    /// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
    pub fn integrate<const N: usize, F>(&self, f: F, t0: f64, y0: [f64; N], t1: f64) -> Solution<N>
    where
        F: FnMut(f64, &[f64; N]) -> Option<[f64; N]>,
    {
        self.integrate_until(f, t0, y0, t1, |_, _| false)
    }

    /// As [`Dopri5::integrate`], stopping early after the first accepted step
    /// for which `stop(t, y)` is true.
    pub fn integrate_until<const N: usize, F, S>(
        &self,
        mut f: F,
        t0: f64,
        y0: [f64; N],
        t1: f64,
        mut stop: S,
    ) -> Solution<N>
    where
        F: FnMut(f64, &[f64; N]) -> Option<[f64; N]>,
        S: FnMut(f64, &[f64; N]) -> bool,
    {
        let o = &self.opts;
        let mut sol = Solution {
            steps: Vec::new(),
            status: OdeStatus::Completed,
            t_start: t0,
            y_start: y0,
            rejected: 0,
            rhs_evals: 0,
        };
        let span = t1 - t0;
        if span == 0.0 {
            return sol;
        }
        let dir = span.signum();
        let mut t = t0;
        let mut y = y0;
        let Some(mut k1) = f(t, &y) else {
            sol.status = OdeStatus::DomainEdge;
            return sol;
        };
        sol.rhs_evals += 1;
        let scale = |a: &[f64; N], b: &[f64; N], i: usize| o.atol + o.rtol * a[i].abs().max(b[i].abs());
        let mut h = match o.h0 {
            Some(h) => h.abs(),
            None => {
                let d0 = rms::<N>(|i| y[i] / scale(&y, &y, i));
                let d1 = rms::<N>(|i| k1[i] / scale(&y, &y, i));
                let guess = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
                guess.min(span.abs())
            }
        }
        .min(o.h_max);
        let mut err_old: f64 = 1e-4;
        let mut last_rejected = false;
        // Resolution floor: relative to |t|, and to the span only up to unit size
        // so that open-ended runs (huge t1) keep fine steps available.
        let tiny = |t: f64| 1e-14 * (t.abs() + span.abs().min(1.0)).max(1e-300);

        loop {
            let remaining = (t1 - t) * dir;
            if remaining <= tiny(t) {
                sol.status = OdeStatus::Completed;
                break;
            }
            if sol.steps.len() >= o.max_steps {
                sol.status = OdeStatus::MaxSteps;
                break;
            }
            let mut final_step = false;
            if h >= remaining {
                h = remaining;
                final_step = true;
            }
            if h < tiny(t) {
                sol.status = OdeStatus::StepUnderflow;
                break;
            }
            let hs = h * dir;
            let stages = (|| {
                let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]))?;
                let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
                let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
                let k5 = f(t + C5 * hs, &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
                let k6 = f(t + hs, &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
                let y1 = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
                let tn = if final_step { t1 } else { t + hs };
                let k7 = f(tn, &y1)?;
                Some((k2, k3, k4, k5, k6, k7, y1))
            })();
            let Some((_k2, k3, k4, k5, k6, k7, y1)) = stages else {
                sol.rhs_evals += 7;
                sol.rejected += 1;
                h *= 0.25;
                last_rejected = true;
                if h < tiny(t) * 10.0 {
                    sol.status = OdeStatus::DomainEdge;
                    break;
                }
                continue;
            };
            sol.rhs_evals += 6;
            let err = rms::<N>(|i| {
                hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]) / scale(&y, &y1, i)
            });
            if !err.is_finite() {
                sol.rejected += 1;
                h *= 0.25;
                last_rejected = true;
                continue;
            }
            if err <= 1.0 {
                let mut rc = [[0.0; N]; 4];
                for i in 0..N {
                    let ydiff = y1[i] - y[i];
                    let bspl = hs * k1[i] - ydiff;
                    rc[0][i] = ydiff;
                    rc[1][i] = bspl;
                    rc[2][i] = ydiff - hs * k7[i] - bspl;
                    rc[3][i] = hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                let tn = if final_step { t1 } else { t + hs };
                sol.steps.push(Step { t0: t, h: tn - t, y0: y, y1, f0: k1, f1: k7, rc });
                t = tn;
                y = y1;
                k1 = k7;
                let err_c = err.max(1e-10);
                let mut fac = 0.9 * err_c.powf(-0.17) * err_old.powf(0.04);
                fac = fac.clamp(0.2, 10.0);
                if last_rejected {
                    fac = fac.min(1.0);
                }
                err_old = err_c;
                last_rejected = false;
                h = (h * fac).min(o.h_max);
                if stop(t, &y) {
                    sol.status = OdeStatus::Stopped;
                    break;
                }
            } else {
                sol.rejected += 1;
                h *= (0.9 * err.powf(-0.2)).max(0.2);
                last_rejected = true;
            }
        }
        sol
    }
}

fn rms<const N: usize>(g: impl Fn(usize) -> f64) -> f64 {
    let s: f64 = (0..N).map(|i| g(i).powi(2)).sum();
    (s / N as f64).sqrt()
}
