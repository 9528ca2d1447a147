use growth_model::{OgEconomy, Technology};

use crate::OgError;

/// Steady states that admit a convergent equilibrium: `f'(k̄)` strictly
/// between `ρ(π+δ)/(π+ρ)` and `δ`. Since `f'` decreases, `k_lo` solves
/// `f' = δ` and `k_hi` solves `f' = ρ(π+δ)/(π+ρ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateInterval {
    pub k_lo: f64,
    pub k_hi: f64,
}

impl SteadyStateInterval {
    pub fn contains_interior(&self, k: f64) -> bool {
        k > self.k_lo && k < self.k_hi
    }

    pub fn is_degenerate(&self) -> bool {
        self.k_lo == self.k_hi
    }

    /// Point at fraction `s ∈ [0, 1]` of the way from `k_lo` to `k_hi`.
    pub fn at(&self, s: f64) -> f64 {
        self.k_lo + s * (self.k_hi - self.k_lo)
    }
}

pub fn steady_state_interval(econ: &OgEconomy) -> Result<SteadyStateInterval, OgError> {
    if matches!(econ.tech, Technology::Linear { .. }) {
        return Err(OgError::UnsupportedTechnology);
    }
    let lo_rate = econ.private_rate;
    let hi_rate = econ.upper_marginal();
    let invert = |r: f64| econ.tech.marginal_inverse(r).ok_or(OgError::UnsupportedTechnology);
    let k_lo = invert(lo_rate)?;
    // Equal rates must give the identical point, not two roundings of it.
    let k_hi = if econ.is_time_consistent() { k_lo } else { invert(hi_rate)? };
    Ok(SteadyStateInterval { k_lo, k_hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn econ(d: f64, r: f64, p: f64) -> OgEconomy {
        OgEconomy::new(d, r, p, Technology::cobb_douglas(1.0, 0.3).unwrap()).unwrap()
    }

    #[test]
    fn canonical_interval() {
        let i = steady_state_interval(&econ(0.06, 0.02, 0.04)).unwrap();
        // (α/x)^{1/(1-α)} with x = 0.06 and x = 0.02·0.1/0.06.
        assert_relative_eq!(i.k_lo, (0.3f64 / 0.06).powf(1.0 / 0.7), max_relative = 1e-14);
        assert_relative_eq!(i.k_hi, (0.3f64 / (0.002 / 0.06)).powf(1.0 / 0.7), max_relative = 1e-14);
        assert!((i.k_lo - 9.966).abs() < 1e-3 && (i.k_hi - 23.078).abs() < 1e-3);
    }

    #[test]
    fn time_consistent_interval_is_a_point() {
        let i = steady_state_interval(&econ(0.05, 0.05, 0.04)).unwrap();
        assert!(i.is_degenerate());
        assert!(!i.contains_interior(i.k_lo));
    }

    #[test]
    fn upper_end_grows_without_bound_as_planner_rate_vanishes() {
        let his: Vec<f64> =
            [1e-2, 1e-3, 1e-4].iter().map(|r| steady_state_interval(&econ(0.06, *r, 0.04)).unwrap().k_hi).collect();
        assert!(his[0] < his[1] && his[1] < his[2]);
        // f'(k_hi) = ρ(π+δ)/(π+ρ) → 0: the golden rule for an undepreciated technology.
        let t = Technology::cobb_douglas(1.0, 0.3).unwrap();
        assert!(t.marginal(his[2]) < 3e-4);
    }

    #[test]
    fn linear_technology_is_unsupported() {
        let e = OgEconomy::new(0.06, 0.02, 0.04, Technology::linear(0.05).unwrap()).unwrap();
        assert_eq!(steady_state_interval(&e), Err(OgError::UnsupportedTechnology));
    }
}
