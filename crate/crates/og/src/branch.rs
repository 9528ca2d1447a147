//! Roots of `x - ln(1+x) = μ`.

use crate::OgError;

/// Which root of `x - ln(1+x) = μ` to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// The root in `(-1, 0]`.
    Below,
    /// The root in `[0, ∞)`.
    Above,
}

/// Largest negative μ treated as rounding noise around zero.
pub const MU_NOISE: f64 = 1e-12;

/// Solves `x - ln(1+x) = μ` on the requested branch by safeguarded Newton.
pub fn branch_solve_x(mu: f64, branch: Branch) -> Result<f64, OgError> {
    if mu.is_nan() || mu < -MU_NOISE {
        return Err(OgError::NoBranchSolution(mu));
    }
    if mu <= 0.0 {
        return Ok(0.0);
    }
    let g = |x: f64| x - x.ln_1p() - mu;
    // x - ln(1+x) ≈ x²/2 - x³/3 near zero.
    let s = (2.0 * mu).sqrt();
    let (mut lo, mut hi, mut x) = match branch {
        Branch::Above => {
            let hi = if mu < 1.0 { 2.0 * s + 1.0 } else { mu + (mu + 1.0).ln() + 2.0 };
            (0.0, hi, if mu < 0.1 { s + s * s / 3.0 } else { mu + (1.0 + mu).ln() })
        }
        Branch::Below => {
            let x0 = if mu < 0.1 { -s + s * s / 3.0 } else { (-(1.0 + mu)).exp() - 1.0 };
            (-1.0, 0.0, x0.clamp(-1.0 + 1e-300, 0.0))
        }
    };
    if !(x > lo && x < hi) {
        x = 0.5 * (lo + hi);
    }
    for _ in 0..100 {
        let gx = g(x);
        if gx == 0.0 {
            return Ok(x);
        }
        // g is increasing on the upper branch and decreasing on the lower one.
        let increasing = branch == Branch::Above;
        if (gx > 0.0) == increasing {
            hi = x;
        } else {
            lo = x;
        }
        let slope = x / (1.0 + x);
        let mut xn = x - gx / slope;
        if !(xn > lo && xn < hi) || !xn.is_finite() {
            xn = 0.5 * (lo + hi);
        }
        if (xn - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(xn);
        }
        x = xn;
    }
    Ok(x)
}

/// `dx/dμ = (1+x)/x` on either branch.
pub fn branch_slope(x: f64) -> f64 {
    (1.0 + x) / x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_is_shared_root() {
        assert_eq!(branch_solve_x(0.0, Branch::Above).unwrap(), 0.0);
        assert_eq!(branch_solve_x(0.0, Branch::Below).unwrap(), 0.0);
        assert_eq!(branch_solve_x(-1e-13, Branch::Below).unwrap(), 0.0);
    }

    #[test]
    fn negative_mu_has_no_solution() {
        assert!(matches!(branch_solve_x(-1e-6, Branch::Above), Err(OgError::NoBranchSolution(_))));
    }

    #[test]
    fn small_mu_roots_scale_like_sqrt_two_mu() {
        let mu = 1e-6;
        let up = branch_solve_x(mu, Branch::Above).unwrap();
        let dn = branch_solve_x(mu, Branch::Below).unwrap();
        let s = (2.0 * mu).sqrt();
        assert!((up / s - 1.0).abs() < 1e-3 && up > 0.0);
        assert!((dn / -s - 1.0).abs() < 1e-3 && dn < 0.0);
        // Independent bisection values.
        assert!((up - 1.414_880_3e-3).abs() < 1e-10);
        assert!((dn + 1.413_547_0e-3).abs() < 1e-10);
    }

    #[test]
    fn unit_mu_upper_root() {
        let x = branch_solve_x(1.0, Branch::Above).unwrap();
        assert!((x - 2.14619).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn residual_vanishes(e in -14.0f64..0.7, above in any::<bool>()) {
            // Past μ ≈ 5 the lower root sits within 1e-2 of -1 and one ulp of x
            // moves the residual by more than 1e-12; the upper root is fine.
            let mu = if above { 10f64.powf(e) * 100.0 } else { 10f64.powf(e) };
            let br = if above { Branch::Above } else { Branch::Below };
            let x = branch_solve_x(mu, br).unwrap();
            prop_assert!((x - x.ln_1p() - mu).abs() <= 1e-12 * mu.max(1.0));
            if above { prop_assert!(x >= 0.0); } else { prop_assert!(x > -1.0 && x <= 0.0); }
        }
    }
}
