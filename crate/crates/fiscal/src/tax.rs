use growth_model::OgEconomy;
use growth_numerics::brent;
use growth_phase::{psi_path, Trajectory};

use crate::{AllocationRule, FiscalError};

/// Ages `0, 0.5, …, 100`.
pub fn default_age_grid() -> Vec<f64> {
    (0..=200).map(|i| 0.5 * i as f64).collect()
}

/// Prices, `ψ` and the capital income tax `η(n, t)` along a planned path.
#[derive(Debug, Clone, PartialEq)]
pub struct FiscalSchedule {
    pub rule: AllocationRule,
    pub ages: Vec<f64>,
    pub times: Vec<f64>,
    pub capital: Vec<f64>,
    pub consumption: Vec<f64>,
    /// Interest rate `r* = f'(K)`.
    pub rates: Vec<f64>,
    /// Wage per head `ω* = π (f(K) - K f'(K))`.
    pub wages: Vec<f64>,
    pub psi: Vec<f64>,
    /// `eta[i][j]` is the tax at `times[i]` on an individual aged `ages[j]`.
    pub eta: Vec<Vec<f64>>,
}

impl FiscalSchedule {
    /// Tax at sample `i` for an arbitrary age.
    pub fn tax(&self, i: usize, age: f64) -> f64 {
        tax_rate(self.rates[i], self.psi[i], self.rule.log_slope(age))
    }
}

fn tax_rate(rate: f64, psi: f64, log_slope: f64) -> f64 {
    (-psi - log_slope) / rate
}

/// `η(n, t) = (-ψ(t) - φ'(n)/φ(n)) / r*_t` on `ages × traj.times`: the tax
/// under which individual Euler equations reproduce `c = φ(n) C(t)`.
pub fn tax_surface(
    traj: &Trajectory,
    rule: AllocationRule,
    econ: &OgEconomy,
    ages: &[f64],
) -> Result<FiscalSchedule, FiscalError> {
    if traj.is_empty() {
        return Err(FiscalError::InvalidArgument("empty trajectory".into()));
    }
    if let Some(&n) = ages.iter().find(|&&n| !(n >= 0.0 && n.is_finite())) {
        return Err(FiscalError::InvalidArgument(format!("ages must be finite and non-negative, got {n}")));
    }
    let tech = econ.tech;
    let psi = psi_path(traj, econ);
    let mut rates = Vec::with_capacity(traj.len());
    let mut wages = Vec::with_capacity(traj.len());
    for (&t, &k) in traj.times.iter().zip(&traj.capital) {
        let (f, fp) = (tech.output(k), tech.marginal(k));
        if !(fp > 0.0) {
            return Err(FiscalError::InvalidPrice { t, rate: fp });
        }
        rates.push(fp);
        wages.push(econ.death_rate * (f - k * fp));
    }
    let slopes: Vec<f64> = ages.iter().map(|&n| rule.log_slope(n)).collect();
    let eta = rates.iter().zip(&psi).map(|(&r, &s)| slopes.iter().map(|&g| tax_rate(r, s, g)).collect()).collect();
    Ok(FiscalSchedule {
        rule,
        ages: ages.to_vec(),
        times: traj.times.clone(),
        capital: traj.capital.clone(),
        consumption: traj.consumption.clone(),
        rates,
        wages,
        psi,
        eta,
    })
}

/// Stationary tax at steady state `k_bar`, where `ψ = δ - f'(k̄)`.
pub fn long_run_tax(econ: &OgEconomy, rule: &AllocationRule, k_bar: f64, age: f64) -> f64 {
    let fp = econ.tech.marginal(k_bar);
    (fp - econ.private_rate - rule.log_slope(age)) / fp
}

/// Age at which the long-run tax changes sign at the steady state with
/// `f'(k̄) = ρ(π+δ)/(π+ρ)`: `ln((δ+π)/π)/δ`.
pub fn cutoff_age(econ: &OgEconomy) -> f64 {
    let (d, p) = (econ.private_rate, econ.death_rate);
    ((d + p) / p).ln() / d
}

/// Root of `long_run_tax(·)` at an arbitrary steady state. `None` when the
/// tax keeps one sign at every age, which happens unless `ρ < f'(k̄) < δ`
/// under the optimal rule.
pub fn cutoff_age_at(econ: &OgEconomy, rule: &AllocationRule, k_bar: f64) -> Option<f64> {
    let g = |n: f64| long_run_tax(econ, rule, k_bar, n);
    if !(g(0.0) > 0.0) {
        return None;
    }
    // The tax falls monotonically in age towards (f' - δ)/f'.
    let mut hi = 50.0;
    while g(hi) >= 0.0 {
        hi *= 2.0;
        if hi > 1e5 {
            return None;
        }
    }
    brent(g, 0.0, hi, 1e-12).ok()
}

/// Long-run uniform subsidy under the egalitarian rule, as the closed form
/// `(π/ρ)(δ-ρ)/(π+ρ)`.
pub fn uniform_subsidy(econ: &OgEconomy) -> f64 {
    let (d, r, p) = (econ.private_rate, econ.social_rate, econ.death_rate);
    p / r * (d - r) / (p + r)
}

/// Subsidy `-η = (δ - f'(k̄))/f'(k̄)` that the egalitarian rule actually
/// requires at steady state `k_bar`.
pub fn steady_state_subsidy(econ: &OgEconomy, k_bar: f64) -> f64 {
    let fp = econ.tech.marginal(k_bar);
    (econ.private_rate - fp) / fp
}

/// Laissez-faire steady state: the root of `(f'(k) - δ) f(k) = π(δ+π) k`
/// below the modified golden rule `f'(k) = δ`.
pub fn market_steady_state(econ: &OgEconomy) -> Result<f64, FiscalError> {
    let (d, p) = (econ.private_rate, econ.death_rate);
    let tech = econ.tech;
    let golden = tech
        .marginal_inverse(d)
        .ok_or_else(|| FiscalError::RootNotFound(format!("no capital stock with f'(k) = {d}")))?;
    let g = |k: f64| (tech.marginal(k) - d) * tech.output(k) - p * (d + p) * k;
    let mut lo = 1e-3 * golden;
    while !(g(lo) > 0.0) {
        lo *= 1e-3;
        if lo < 1e-300 {
            return Err(FiscalError::RootNotFound("no sign change below the modified golden rule".into()));
        }
    }
    brent(g, lo, golden, 1e-15 * golden).map_err(|e| FiscalError::RootNotFound(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::AllocationVariant;
    use growth_model::Technology;

    fn econ() -> OgEconomy {
        OgEconomy::new(0.06, 0.02, 0.04, Technology::cobb_douglas(1.0, 0.3).unwrap()).unwrap()
    }

    #[test]
    fn age_grid_spans_a_century() {
        let g = default_age_grid();
        assert_eq!(g.len(), 201);
        assert_eq!((g[0], g[1], g[200]), (0.0, 0.5, 100.0));
    }

    #[test]
    fn cutoff_value() {
        assert!((cutoff_age(&econ()) - 2.5f64.ln() / 0.06).abs() < 1e-12);
        assert!((cutoff_age(&econ()) - 15.27).abs() < 5e-3);
    }

    #[test]
    fn uniform_subsidy_value() {
        assert!((uniform_subsidy(&econ()) - 4.0 / 3.0).abs() < 1e-12);
        let tc = OgEconomy::new(0.05, 0.05, 0.04, econ().tech).unwrap();
        assert_eq!(uniform_subsidy(&tc), 0.0);
    }

    #[test]
    fn linear_technology_has_no_market_steady_state() {
        let e = OgEconomy::new(0.06, 0.02, 0.04, Technology::linear(0.1).unwrap()).unwrap();
        assert!(matches!(market_steady_state(&e), Err(FiscalError::RootNotFound(_))));
    }

    #[test]
    fn egalitarian_long_run_tax_is_flat() {
        let e = econ();
        let rule = AllocationRule::new(&e, AllocationVariant::Egalitarian);
        let a = long_run_tax(&e, &rule, 12.0, 0.0);
        assert_eq!(a, long_run_tax(&e, &rule, 12.0, 70.0));
        assert!((a + steady_state_subsidy(&e, 12.0)).abs() < 1e-15);
        assert_eq!(cutoff_age_at(&e, &rule, 12.0), None);
    }
}
