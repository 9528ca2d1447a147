use growth_model::OgEconomy;

use crate::seed::stability_closed_form;
use crate::solve::ValuePair;
use crate::OgError;

/// The attractor test `f'(k̄) + v''(k̄)/v'(k̄)²` computed in closed form and
/// from the solved grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub closed_form: f64,
    pub numerical: f64,
}

impl StabilityReport {
    pub fn converges(&self) -> bool {
        self.closed_form < 0.0
    }
}

/// Relative disagreement allowed between the two computations.
pub const STABILITY_AGREEMENT: f64 = 1e-3;

/// Compares the closed form with `v''(k̄)` from centred differences of the
/// knot slopes `v'` nearest to `k̄`.
pub fn stability_test(econ: &OgEconomy, pair: &ValuePair) -> Result<StabilityReport, OgError> {
    let kb = pair.k_bar;
    let closed_form = stability_closed_form(econ, kb);
    let i = pair.steady_index();
    if i == 0 || i + 1 >= pair.ks.len() {
        return Err(OgError::InvalidArgument("steady state must be an interior knot".into()));
    }
    let (km, kp) = (pair.ks[i - 1], pair.ks[i + 1]);
    let vpp = (pair.vp[i + 1] - pair.vp[i - 1]) / (kp - km);
    let vp = pair.vp[i];
    let numerical = econ.tech.marginal(kb) + vpp / (vp * vp);
    if (numerical - closed_form).abs() > STABILITY_AGREEMENT * closed_form.abs() {
        return Err(OgError::Diagnostics { closed: closed_form, numerical });
    }
    Ok(StabilityReport { closed_form, numerical })
}
