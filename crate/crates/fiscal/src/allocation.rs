use growth_model::OgEconomy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllocationVariant {
    /// The intra-period planner's rule, tilted towards the young when δ > ρ.
    Optimal,
    /// `φ ≡ π`: every living individual consumes the same amount.
    Egalitarian,
}

/// Share `c(t - n, t) = φ(n) C(t)` of aggregate consumption received by an
/// individual of age `n`. Cohorts have density `e^{-πn}`, so
/// `∫ e^{-πn} φ(n) dn = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationRule {
    pub variant: AllocationVariant,
    delta: f64,
    rho: f64,
    pi: f64,
}

impl AllocationRule {
    pub fn new(econ: &OgEconomy, variant: AllocationVariant) -> Self {
        Self { variant, delta: econ.private_rate, rho: econ.social_rate, pi: econ.death_rate }
    }

    /// `(π/δ)((δ+π)/(ρ+π))` for the optimal rule.
    fn scale(&self) -> f64 {
        let (d, r, p) = (self.delta, self.rho, self.pi);
        p / d * (d + p) / (r + p)
    }

    pub fn phi(&self, n: f64) -> f64 {
        match self.variant {
            AllocationVariant::Egalitarian => self.pi,
            AllocationVariant::Optimal => {
                let (d, r) = (self.delta, self.rho);
                self.scale() * ((d - r) * (-d * n).exp() + r)
            }
        }
    }

    pub fn phi_prime(&self, n: f64) -> f64 {
        match self.variant {
            AllocationVariant::Egalitarian => 0.0,
            AllocationVariant::Optimal => {
                let (d, r) = (self.delta, self.rho);
                -self.scale() * d * (d - r) * (-d * n).exp()
            }
        }
    }

    /// `φ'(n)/φ(n)`, evaluated without forming either factor separately.
    pub fn log_slope(&self, n: f64) -> f64 {
        match self.variant {
            AllocationVariant::Egalitarian => 0.0,
            AllocationVariant::Optimal => {
                let (d, r) = (self.delta, self.rho);
                let e = (d - r) * (-d * n).exp();
                -d * e / (e + r)
            }
        }
    }

    /// `∫₀^∞ e^{-πn} φ(n) dn` in closed form; equal to one up to rounding.
    pub fn normalization(&self) -> f64 {
        let (d, r, p) = (self.delta, self.rho, self.pi);
        match self.variant {
            AllocationVariant::Egalitarian => 1.0,
            AllocationVariant::Optimal => self.scale() * ((d - r) / (d + p) + r / p),
        }
    }
}

pub fn allocation_rule(econ: &OgEconomy, variant: AllocationVariant) -> AllocationRule {
    AllocationRule::new(econ, variant)
}

/// Consumption of an individual of age `n` at date `s` under the rule the
/// intra-period planner would commit to at date 0, given aggregate `c`.
/// Ages up to `s` belong to cohorts born after the commitment date.
pub fn commitment_allocation(econ: &OgEconomy, n: f64, s: f64, c: f64) -> f64 {
    let (d, r, p) = (econ.private_rate, econ.social_rate, econ.death_rate);
    let g = p + d - r;
    let denom = p + (d - r) * (-g * s).exp();
    let tilt = ((r - d) * n.min(s)).exp();
    p * g * tilt / denom * c
}

#[cfg(test)]
mod tests {
    use super::*;
    use growth_model::Technology;
    use growth_numerics::quad;

    fn econ(d: f64, r: f64, p: f64) -> OgEconomy {
        OgEconomy::new(d, r, p, Technology::cobb_douglas(1.0, 0.3).unwrap()).unwrap()
    }

    #[test]
    fn optimal_rule_end_points() {
        let rule = AllocationRule::new(&econ(0.06, 0.02, 0.04), AllocationVariant::Optimal);
        assert!((rule.phi(0.0) - 0.04 * 0.1 / 0.06).abs() < 1e-15);
        assert!((rule.phi(1e4) - (0.04 / 0.06) * (0.1 / 0.06) * 0.02).abs() < 1e-15);
        assert!((rule.phi(0.0) - 0.06667).abs() < 1e-5 && (rule.phi(1e4) - 0.02222).abs() < 1e-5);
    }

    #[test]
    fn normalization_by_quadrature() {
        let rule = AllocationRule::new(&econ(0.06, 0.02, 0.04), AllocationVariant::Optimal);
        let q = quad::adaptive(|n| (-0.04 * n).exp() * rule.phi(n), 0.0, 1500.0, 1e-14, 1e-13);
        assert!((q - 1.0).abs() <= 1e-10, "{q}");
        assert!((rule.normalization() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn equal_rates_give_the_egalitarian_rule() {
        let e = econ(0.05, 0.05, 0.04);
        let rule = AllocationRule::new(&e, AllocationVariant::Optimal);
        for n in [0.0, 3.0, 40.0] {
            assert!((rule.phi(n) - 0.04).abs() < 1e-15);
            assert_eq!(rule.phi_prime(n), 0.0);
        }
    }

    #[test]
    fn log_slope_matches_ratio() {
        let rule = AllocationRule::new(&econ(0.06, 0.02, 0.04), AllocationVariant::Optimal);
        for n in [0.0, 1.0, 15.0, 90.0] {
            let ratio = rule.phi_prime(n) / rule.phi(n);
            assert!((rule.log_slope(n) - ratio).abs() <= 1e-15 * (1.0 + ratio.abs()));
        }
    }
}
