use growth_model::OgEconomy;
use growth_og::steady_state_interval;

use crate::RenegError;

/// `∂V/∂k̄` on the diagonal `k₀ = k̄`:
/// `(1/f(k̄)) ((π+ρ)/(ρ(π+δ)) f'(k̄) - 1)`.
///
/// Along the diagonal `V(k̄, k̄)` is the steady-state value, whose slope is
/// this plus `∂V/∂k₀ = 1/f(k̄)`.
pub fn renegotiation_derivative(econ: &OgEconomy, k_bar: f64) -> f64 {
    let (d, r, p) = (econ.private_rate, econ.social_rate, econ.death_rate);
    let (f, fp) = (econ.tech.output(k_bar), econ.tech.marginal(k_bar));
    ((p + r) / (r * (p + d)) * fp - 1.0) / f
}

/// The only steady state at which moving `k̄` up cannot raise `V`: the upper
/// end of the interval, `f'(k̄) = ρ(π+δ)/(π+ρ)`.
pub fn lrp_select(econ: &OgEconomy) -> Result<f64, RenegError> {
    Ok(steady_state_interval(econ)?.k_hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub social_rate: f64,
    pub k_bar: f64,
    pub marginal: f64,
}

/// Selected steady state as the planner's rate varies, other parameters
/// fixed. Rates outside `(0, δ]` are rejected.
pub fn lrp_sweep(econ: &OgEconomy, social_rates: &[f64]) -> Result<Vec<SweepPoint>, RenegError> {
    social_rates
        .iter()
        .map(|&rho| {
            let e = OgEconomy::new(econ.private_rate, rho, econ.death_rate, econ.tech)
                .map_err(|err| RenegError::InvalidArgument(format!("social rate {rho}: {err}")))?;
            let k_bar = lrp_select(&e)?;
            Ok(SweepPoint { social_rate: rho, k_bar, marginal: e.tech.marginal(k_bar) })
        })
        .collect()
}
