use growth_flow::{CandidateValue, Evaluator, PolicyFunction};
use growth_model::{DiscountKernel, Technology, Utility};
use growth_numerics::{brent, quad};

use crate::OracleError;

/// Linear technology `f(k) = A k` with a discount factor equal to
/// `e^{-δ₀t}` up to `τ` and `e^{-δ₁t}` after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearCase {
    pub productivity: f64,
    pub near_rate: f64,
    pub far_rate: f64,
    pub switch: f64,
}

impl LinearCase {
    /// Requires `A > 0`, `δ₀ ≥ δ₁ > 0` and `τ > 0`.
    pub fn new(productivity: f64, near_rate: f64, far_rate: f64, switch: f64) -> Result<Self, OracleError> {
        if !(productivity > 0.0 && far_rate > 0.0 && near_rate >= far_rate && switch > 0.0) {
            return Err(OracleError::InvalidCase(format!(
                "need A > 0, δ₀ ≥ δ₁ > 0, τ > 0; got A = {productivity}, δ₀ = {near_rate}, δ₁ = {far_rate}, τ = {switch}"
            )));
        }
        Ok(Self { productivity, near_rate, far_rate, switch })
    }

    pub fn kernel(&self) -> DiscountKernel {
        DiscountKernel::piecewise(self.near_rate, self.far_rate, self.switch).expect("validated in new")
    }

    pub fn tech(&self) -> Technology {
        Technology::linear(self.productivity).expect("validated in new")
    }

    /// Weight `e^{-δ₁τ}/δ₁` of the late segment.
    fn late_mass(&self) -> f64 {
        (-self.far_rate * self.switch).exp() / self.far_rate
    }

    pub fn naive_slope(&self) -> f64 {
        self.near_rate
    }

    /// `δ₀ / (1 + ((δ₀-δ₁)/δ₁) e^{-δ₁τ})`; never above the naive slope.
    pub fn equilibrium_slope(&self) -> f64 {
        self.near_rate / (1.0 + (self.near_rate - self.far_rate) * self.late_mass())
    }
}

pub fn linear_naive_policy(case: &LinearCase, k: f64) -> f64 {
    case.naive_slope() * k
}

pub fn linear_equilibrium_policy(case: &LinearCase, k: f64) -> f64 {
    case.equilibrium_slope() * k
}

/// `∫_τ^∞ e^{-δ₁t} ln σ(K(t)) dt` along the equilibrium flow
/// `K(t) = k e^{(A-s)t}`, by quadrature.
pub fn footnote_g(case: &LinearCase, k: f64) -> f64 {
    let s = case.equilibrium_slope();
    let growth = case.productivity - s;
    let d1 = case.far_rate;
    let integrand = |t: f64| (-d1 * t).exp() * (s * k).ln() + (-d1 * t).exp() * growth * t;
    let end = case.switch + 80.0 / d1;
    quad::adaptive(integrand, case.switch, end, 1e-15, 1e-13)
}

/// `δ₀ v - max_c[ln c + v'(A k - c)] - (δ₀-δ₁) g(k)` with
/// `v = ln k / s + offset_v` and `g = e^{-δ₁τ}/δ₁ ln k + offset_g`.
pub fn hjb_example_residual(case: &LinearCase, k: f64, offset_v: f64, offset_g: f64) -> f64 {
    let lead = 1.0 / case.equilibrium_slope();
    let v = lead * k.ln() + offset_v;
    let vp = lead / k;
    let g = case.late_mass() * k.ln() + offset_g;
    let sup = Utility::Log.hamiltonian_max(vp, case.productivity * k);
    case.near_rate * v - sup - (case.near_rate - case.far_rate) * g
}

/// The constant in `g` that makes `hjb_example_residual` vanish at `k = 1`.
/// Zero when `δ₀ = δ₁`, where `g` drops out.
pub fn pinned_offset(case: &LinearCase, offset_v: f64) -> f64 {
    let gap = case.near_rate - case.far_rate;
    if gap == 0.0 {
        return 0.0;
    }
    let lead = 1.0 / case.equilibrium_slope();
    let sup = Utility::Log.hamiltonian_max(lead, case.productivity);
    (case.near_rate * offset_v - sup) / gap
}

/// Coefficient of `ln k` in a residual that is affine in `ln k` for linear
/// policies, read off from two evaluations.
fn log_coefficient<F>(slope: f64, case: &LinearCase, residual: F) -> Result<f64, OracleError>
where
    F: Fn(&Evaluator, &CandidateValue, &[f64]) -> Result<Vec<f64>, growth_flow::FlowError>,
{
    let pol = PolicyFunction::linear(slope)?;
    let tech = case.tech();
    let ev = Evaluator::new(&pol, &tech, Utility::Log);
    let v = CandidateValue::log_linear(1.0 / slope, 0.0);
    let (k1, k2) = (1.0, std::f64::consts::E);
    let r = residual(&ev, &v, &[k1, k2])?;
    Ok(r[1] - r[0])
}

fn solve_slope<F>(case: &LinearCase, residual: F) -> Result<f64, OracleError>
where
    F: Fn(&Evaluator, &CandidateValue, &[f64]) -> Result<Vec<f64>, growth_flow::FlowError>,
{
    let mut failure = None;
    let s = brent(
        |s| {
            log_coefficient(s, case, &residual).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                f64::NAN
            })
        },
        1e-2 * case.near_rate,
        2.0 * case.near_rate,
        1e-15,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(s?),
    }
}

/// Slope at which the differentiated equation, evaluated by the flow engine
/// on the piecewise kernel, holds for a log-linear candidate value.
pub fn de_linear_slope(case: &LinearCase) -> Result<f64, OracleError> {
    let kern = case.kernel();
    solve_slope(case, |ev, v, ks| ev.de_residual(&kern, v, ks))
}

/// Slope at which the integral equation holds: `1/∫h`. It differs from
/// `de_linear_slope` because the kernel jumps at `τ`.
pub fn ie_linear_slope(case: &LinearCase) -> Result<f64, OracleError> {
    let kern = case.kernel();
    solve_slope(case, |ev, v, ks| ev.ie_residual(&kern, v, ks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn footnote_example_values() {
        let c = LinearCase::new(0.08, 0.10, 0.05, 1.0).unwrap();
        assert!((linear_naive_policy(&c, 10.0) - 1.0).abs() < 1e-15);
        assert!((linear_equilibrium_policy(&c, 1.0) - 0.1 / (1.0 + (-0.05f64).exp())).abs() < 1e-15);
        assert!((linear_equilibrium_policy(&c, 1.0) - 0.051250).abs() < 5e-7);
    }

    #[test]
    fn rejects_increasing_rates() {
        assert!(LinearCase::new(0.08, 0.05, 0.10, 1.0).is_err());
        assert!(LinearCase::new(0.08, 0.10, 0.05, 0.0).is_err());
    }

    #[test]
    fn g_offset_is_the_expected_constant() {
        // ∫_τ^∞ e^{-δ₁t} (ln s + (A-s) t) dt in closed form.
        let c = LinearCase::new(0.08, 0.10, 0.05, 1.0).unwrap();
        let (s, d1, tau) = (c.equilibrium_slope(), 0.05f64, 1.0);
        let m0 = (-d1 * tau).exp() / d1;
        let m1 = (-d1 * tau).exp() * (tau / d1 + 1.0 / (d1 * d1));
        assert!((footnote_g(&c, 1.0) - (m0 * s.ln() + (0.08 - s) * m1)).abs() < 1e-10);
    }
}
