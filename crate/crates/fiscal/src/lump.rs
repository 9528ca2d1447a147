use growth_model::OgEconomy;
use growth_numerics::{quad, CubicHermite, Dopri5, OdeOptions, OdeStatus};

use crate::{FiscalError, FiscalSchedule};

/// Budget terms of one vintage at the date its plan starts, `max(τ, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LumpSum {
    pub vintage: f64,
    pub date: f64,
    /// Planned consumption `φ(age) C` at `date`.
    pub consumption: f64,
    pub human_wealth: f64,
    pub assets: f64,
    /// Present value of transfers `b = c/(δ+π) - h - a`.
    pub transfers: f64,
    /// Fraction of `human_wealth` earned after the last sample, where the
    /// path is replaced by its steady state.
    pub tail_share: f64,
}

/// Cubic through the samples, or a constant when there is only one.
enum Path {
    Constant(f64),
    Curve(CubicHermite),
}

impl Path {
    fn new(ts: &[f64], ys: &[f64]) -> Self {
        if ts.len() < 2 {
            Path::Constant(ys[0])
        } else {
            Path::Curve(CubicHermite::from_values(ts.to_vec(), ys.to_vec()))
        }
    }

    fn at(&self, t: f64) -> f64 {
        match self {
            Path::Constant(y) => *y,
            Path::Curve(c) => c.eval(t),
        }
    }
}

/// Lump-sum present values `b(τ, max(τ, 0))` for each vintage.
///
/// Human wealth discounts the wage at the after-tax annuity rate
/// `(1-η)r + π = r + ψ + π + φ'/φ`, so
/// `h(τ,t) = φ(t-τ) ∫_t^∞ ω_s e^{-∫(r+ψ+π)} / φ(s-τ) ds`. Beyond the last
/// sample prices are frozen at their final values. Assets at date 0 of
/// vintages born before it default to the equal share `π K(0)`.
pub fn lump_sum_present_values(
    schedule: &FiscalSchedule,
    econ: &OgEconomy,
    vintages: &[f64],
    initial_assets: Option<&[f64]>,
) -> Result<Vec<LumpSum>, FiscalError> {
    if let Some(a) = initial_assets {
        if a.len() != vintages.len() {
            return Err(FiscalError::InvalidArgument(format!(
                "{} asset entries for {} vintages",
                a.len(),
                vintages.len()
            )));
        }
    }
    let s = schedule;
    let last = s.times.len() - 1;
    let t_end = s.times[last];
    let (d, p) = (econ.private_rate, econ.death_rate);
    let tech = econ.tech;
    let rule = s.rule;
    let capital = Path::new(&s.times, &s.capital);
    let consumption = Path::new(&s.times, &s.consumption);
    let psi = Path::new(&s.times, &s.psi);

    let tail_rate = s.rates[last] + s.psi[last] + p;
    if !(tail_rate > 0.0) {
        return Err(FiscalError::Diagnostics(format!("human wealth diverges: terminal discount rate {tail_rate}")));
    }
    let solver = Dopri5::new(OdeOptions { rtol: 1e-11, atol: 1e-13, ..OdeOptions::default() });

    let mut out = Vec::with_capacity(vintages.len());
    for (i, &tau) in vintages.iter().enumerate() {
        let date = tau.max(0.0);
        if !(tau.is_finite() && date <= t_end) {
            return Err(FiscalError::InvalidArgument(format!("vintage {tau} starts after the last sample {t_end}")));
        }
        // y = [∫ (r + ψ + π), ∫ ω e^{-y₀} / φ(s - τ)].
        let rhs = |t: f64, y: &[f64; 2]| -> Option<[f64; 2]> {
            let k = capital.at(t);
            let (f, fp) = (tech.output(k), tech.marginal(k));
            let wage = p * (f - k * fp);
            Some([fp + psi.at(t) + p, wage * (-y[0]).exp() / rule.phi(t - tau)])
        };
        let [disc, body] = if date < t_end {
            let sol = solver.integrate(rhs, date, [0.0, 0.0], t_end);
            if sol.status != OdeStatus::Completed {
                return Err(FiscalError::Diagnostics(format!(
                    "human wealth integration for vintage {tau} stopped: {:?}",
                    sol.status
                )));
            }
            sol.y_end()
        } else {
            [0.0, 0.0]
        };
        let age_end = t_end - tau;
        let tail = s.wages[last]
            * quad::adaptive(|u| (-tail_rate * u).exp() / rule.phi(age_end + u), 0.0, 40.0 / tail_rate, 1e-16, 1e-13);
        let tail = (-disc).exp() * tail;
        let scale = rule.phi(date - tau);
        let human_wealth = scale * (body + tail);
        let consumption = rule.phi(date - tau) * consumption.at(date);
        let assets = if tau < 0.0 { initial_assets.map_or(p * s.capital[0], |a| a[i]) } else { 0.0 };
        out.push(LumpSum {
            vintage: tau,
            date,
            consumption,
            human_wealth,
            assets,
            transfers: consumption / (d + p) - human_wealth - assets,
            tail_share: tail / (body + tail),
        });
    }
    Ok(out)
}
