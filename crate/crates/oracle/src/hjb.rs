use growth_flow::{Evaluator, PolicyFunction};
use growth_model::{DiscountKernel, Technology, Utility};

use crate::OracleError;

/// Residuals of the constant-discount optimality conditions at each grid
/// point.
#[derive(Debug, Clone, PartialEq)]
pub struct HjbCheck {
    pub ks: Vec<f64>,
    /// `δ₀ v(k) - max_c [u(c) + v'(k)(f(k) - c)]` with `v` and `v'` from the
    /// flow generated by the policy.
    pub hjb: Vec<f64>,
    /// `σ'(k)(f - σ)/σ - (f'(k) - δ₀)`: consumption growth along the path
    /// through `k` against the Euler equation (log utility).
    pub euler: Vec<f64>,
}

impl HjbCheck {
    pub fn max_hjb(&self) -> f64 {
        self.hjb.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn max_euler(&self) -> f64 {
        self.euler.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

pub fn hjb_constant_discount_check(
    policy: &PolicyFunction,
    tech: &Technology,
    rate: f64,
    utility: Utility,
    grid: &[f64],
) -> Result<HjbCheck, OracleError> {
    let kern = DiscountKernel::exponential(rate)?;
    let ev = Evaluator::new(policy, tech, utility);
    let mut out =
        HjbCheck { ks: grid.to_vec(), hjb: Vec::with_capacity(grid.len()), euler: Vec::with_capacity(grid.len()) };
    for &k in grid {
        let v = ev.value(&kern, k)?;
        let vp = ev.shadow_value(&kern, k)?;
        out.hjb.push(rate * v - utility.hamiltonian_max(vp, tech.output(k)));
        let (s, sp, _) = policy.eval_all(k);
        out.euler.push(sp * (tech.output(k) - s) / s - (tech.marginal(k) - rate));
    }
    Ok(out)
}
