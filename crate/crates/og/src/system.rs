//! The value-pair system in capital and its desingularized form.

use growth_model::{OgEconomy, Technology};

use crate::branch::{branch_solve_x, Branch};

/// Discount and death rates `(δ, ρ, π)` of an economy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub delta: f64,
    pub rho: f64,
    pub pi: f64,
}

impl From<&OgEconomy> for Rates {
    fn from(e: &OgEconomy) -> Self {
        Self { delta: e.private_rate, rho: e.social_rate, pi: e.death_rate }
    }
}

/// Everything known about the value pair at one capital level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointState {
    pub k: f64,
    pub v: f64,
    pub w: f64,
    pub vp: f64,
    pub wp: f64,
    /// `x = f v' - 1`; zero exactly at the steady state.
    pub x: f64,
    pub sigma: f64,
    pub sigma_p: f64,
}

/// `μ = δ v - (δ-ρ) w - ln f(k)`, nonnegative on any solution.
pub fn mu(r: Rates, tech: &Technology, k: f64, v: f64, w: f64) -> f64 {
    r.delta * v - (r.delta - r.rho) * w - tech.output(k).ln()
}

/// `(v', w', x)` from the state `(v, w)`, or `None` when the state admits
/// no real `x` on the branch or sits on the singular set `x = 0`.
pub fn value_rhs(r: Rates, tech: &Technology, k: f64, v: f64, w: f64, branch: Branch) -> Option<(f64, f64, f64)> {
    if !(k > 0.0) {
        return None;
    }
    let x = branch_solve_x(mu(r, tech, k, v, w), branch).ok()?;
    if x == 0.0 || x <= -1.0 {
        return None;
    }
    let f = tech.output(k);
    let vp = (1.0 + x) / f;
    let wp = (1.0 + x) * (-r.pi * v + (r.rho + r.pi) * w) / (f * x);
    (vp.is_finite() && wp.is_finite()).then_some((vp, wp, x))
}

/// The function whose sign drives `x` along the desingularized flow.
pub fn d_function(r: Rates, tech: &Technology, x: f64, k: f64, v: f64) -> f64 {
    let (d, rho, p) = (r.delta, r.rho, r.pi);
    (1.0 + x) * (-rho * (p + d) * v + (p + d + rho) * x + (p + rho) * (tech.output(k).ln() - x.ln_1p()))
        - x * tech.marginal(k)
}

/// `(dx/ds, dk/ds, dv/ds)` of the desingularized system: the value-pair
/// system with `w` eliminated and time rescaled by `f x² / (1+x)`.
pub fn desingularized_rhs(econ: &OgEconomy, x: f64, k: f64, v: f64) -> (f64, f64, f64) {
    let r = Rates::from(econ);
    let f = econ.tech.output(k);
    (d_function(r, &econ.tech, x, k, v), f * x * x / (1.0 + x), x * x)
}

/// Full point state from `(k, v, w)` away from the steady state.
pub fn point_state(r: Rates, tech: &Technology, k: f64, v: f64, w: f64, branch: Branch) -> Option<PointState> {
    let (vp, wp, x) = value_rhs(r, tech, k, v, w, branch)?;
    let f = tech.output(k);
    let xp = (1.0 + x) * d_function(r, tech, x, k, v) / (f * x * x);
    let sigma = f / (1.0 + x);
    let sigma_p = tech.marginal(k) / (1.0 + x) - f * xp / ((1.0 + x) * (1.0 + x));
    Some(PointState { k, v, w, vp, wp, x, sigma, sigma_p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn econ() -> OgEconomy {
        OgEconomy::new(0.06, 0.02, 0.04, Technology::cobb_douglas(1.0, 0.3).unwrap()).unwrap()
    }

    #[test]
    fn steady_state_is_an_equilibrium_of_the_desingularized_flow() {
        let e = econ();
        let kb = 12.0;
        let (a, b, c) = desingularized_rhs(&e, 0.0, kb, e.steady_value(kb));
        assert!(a.abs() < 1e-15 && b == 0.0 && c == 0.0);
    }

    #[test]
    fn linearization_at_the_steady_state() {
        let e = econ();
        let r = Rates::from(&e);
        let kb = 12.0;
        let vb = e.steady_value(kb);
        let h = 1e-6;
        let dx = (d_function(r, &e.tech, h, kb, vb) - d_function(r, &e.tech, -h, kb, vb)) / (2.0 * h);
        assert_relative_eq!(dx, 0.06 - e.tech.marginal(kb), max_relative = 1e-7);
        // Along the curve v = v̄(k) of equilibria D vanishes identically.
        for k in [10.5, 12.0, 17.0] {
            assert!(d_function(r, &e.tech, 0.0, k, e.steady_value(k)).abs() < 1e-14);
        }
    }

    #[test]
    fn rhs_refuses_negative_mu() {
        let e = econ();
        let r = Rates::from(&e);
        let kb = 12.0;
        let (v, w) = (e.steady_value(kb), e.steady_unborn(kb));
        assert!(value_rhs(r, &e.tech, kb, v - 1e-6, w, Branch::Above).is_none());
        assert!(value_rhs(r, &e.tech, kb, v, w, Branch::Above).is_none());
    }
}
