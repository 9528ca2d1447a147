//! Truncated power series arithmetic.
//!
//! A series is a coefficient vector `a` representing `Σ a[n] z^n`; every
//! operation truncates to the length of its first argument.

/// Cauchy product truncated to `a.len()` terms.
pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n).map(|k| (0..=k).filter(|&j| k - j < b.len()).map(|j| a[j] * b[k - j]).sum()).collect()
}

/// Quotient `a / b`; requires `b[0] != 0`.
pub fn div(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut q = vec![0.0; n];
    for k in 0..n {
        let mut s = a[k];
        for j in 1..=k.min(b.len() - 1) {
            s -= b[j] * q[k - j];
        }
        q[k] = s / b[0];
    }
    q
}

/// Natural logarithm; requires `a[0] > 0`.
pub fn ln(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut l = vec![0.0; n];
    l[0] = a[0].ln();
    // a l' = a'  =>  k a0 l_k = k a_k - Σ_{j=1}^{k-1} j l_j a_{k-j}
    for k in 1..n {
        let mut s = k as f64 * a[k];
        for j in 1..k {
            s -= j as f64 * l[j] * a[k - j];
        }
        l[k] = s / (k as f64 * a[0]);
    }
    l
}

/// Coefficients of `(1 + z/c)^p`.
pub fn binomial(p: f64, c: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    if n == 0 {
        return out;
    }
    out[0] = 1.0;
    for k in 1..n {
        out[k] = out[k - 1] * (p - (k - 1) as f64) / (k as f64 * c);
    }
    out
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Term-wise derivative; the result has one fewer coefficient.
pub fn deriv(a: &[f64]) -> Vec<f64> {
    a.iter().enumerate().skip(1).map(|(k, x)| k as f64 * x).collect()
}

/// Horner evaluation of the first `terms` coefficients.
pub fn eval(a: &[f64], z: f64, terms: usize) -> f64 {
    a[..terms.min(a.len())].iter().rev().fold(0.0, |acc, c| acc * z + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_of_exp_series_is_identity() {
        let n = 12;
        let mut e = vec![1.0; n];
        for k in 1..n {
            e[k] = e[k - 1] / k as f64;
        }
        let l = ln(&e);
        assert_relative_eq!(l[1], 1.0, epsilon = 1e-14);
        for c in &l[2..] {
            assert!(c.abs() < 1e-14);
        }
    }

    #[test]
    fn div_inverts_mul() {
        let a = [1.0, 2.0, -0.5, 0.3, 0.0, 1.1];
        let b = [2.0, -1.0, 0.25, 0.7, 0.2, -0.4];
        let q = div(&mul(&a, &b), &b);
        for (x, y) in q.iter().zip(a) {
            assert_relative_eq!(*x, y, epsilon = 1e-13);
        }
    }

    #[test]
    fn binomial_matches_power() {
        let c = binomial(0.3, 12.0, 30);
        let z: f64 = 1.7;
        assert_relative_eq!(eval(&c, z, 30), (1.0 + z / 12.0).powf(0.3), epsilon = 1e-14);
    }
}
