use serde::{Deserialize, Serialize};

use crate::{DiscountKernel, ModelError, Technology, Utility};

/// Perpetual-youth economy whose planner discounts with the two-exponential
/// mixture. Requires `δ ≥ ρ > 0` and `π > 0`; `δ = ρ` is the time-consistent
/// special case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OgEconomy {
    /// Individual discount rate δ.
    pub private_rate: f64,
    /// Planner discount rate ρ.
    pub social_rate: f64,
    /// Death rate π.
    pub death_rate: f64,
    pub tech: Technology,
    #[serde(default)]
    pub utility: Utility,
}

impl OgEconomy {
    pub fn new(private_rate: f64, social_rate: f64, death_rate: f64, tech: Technology) -> Result<Self, ModelError> {
        DiscountKernel::og_mixture(private_rate, social_rate, death_rate)?;
        let tech = tech.validated()?;
        Ok(Self { private_rate, social_rate, death_rate, tech, utility: Utility::Log })
    }

    pub fn validated(self) -> Result<Self, ModelError> {
        Self::new(self.private_rate, self.social_rate, self.death_rate, self.tech)
    }

    pub fn kernel(&self) -> DiscountKernel {
        DiscountKernel::og_mixture(self.private_rate, self.social_rate, self.death_rate)
            .expect("parameters validated at construction")
    }

    /// `δ = ρ`: the planner is time consistent.
    pub fn is_time_consistent(&self) -> bool {
        self.private_rate == self.social_rate
    }

    /// `ρ < π`, the side condition used by the local stability argument.
    pub fn social_below_death(&self) -> bool {
        self.social_rate < self.death_rate
    }

    /// `ρ(π+δ)/(π+ρ)`, the marginal product at the highest admissible steady state.
    pub fn upper_marginal(&self) -> f64 {
        let (d, r, p) = (self.private_rate, self.social_rate, self.death_rate);
        r * (p + d) / (p + r)
    }

    /// `v(k̄) = (ρ+π)/(ρ(δ+π)) ln f(k̄)`.
    pub fn steady_value(&self, k_bar: f64) -> f64 {
        let (d, r, p) = (self.private_rate, self.social_rate, self.death_rate);
        (r + p) / (r * (d + p)) * self.tech.output(k_bar).ln()
    }

    /// `w(k̄) = π/(ρ(δ+π)) ln f(k̄)`.
    pub fn steady_unborn(&self, k_bar: f64) -> f64 {
        let (d, r, p) = (self.private_rate, self.social_rate, self.death_rate);
        p / (r * (d + p)) * self.tech.output(k_bar).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn canonical_steady_values() {
        let e = OgEconomy::new(0.06, 0.02, 0.04, Technology::cobb_douglas(1.0, 0.3).unwrap()).unwrap();
        assert_relative_eq!(e.steady_value(12.0), 30.0 * 12f64.powf(0.3).ln(), max_relative = 1e-14);
        assert_relative_eq!(e.steady_value(12.0), 22.364, epsilon = 1e-3);
        assert_relative_eq!(e.steady_unborn(12.0), 14.909, epsilon = 1e-3);
        assert!(e.social_below_death());
        assert!(!e.is_time_consistent());
    }

    #[test]
    fn validation() {
        let t = Technology::cobb_douglas(1.0, 0.3).unwrap();
        assert!(OgEconomy::new(0.02, 0.06, 0.04, t).is_err());
        assert!(OgEconomy::new(0.06, 0.06, 0.04, t).unwrap().is_time_consistent());
    }
}
