//! Bracketing scalar root finding.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("no sign change on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}")]
    NoBracket { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("function not finite at {x}")]
    NotFinite { x: f64 },
    #[error("no convergence after {iters} iterations")]
    NoConvergence { iters: usize },
}

/// Brent's method on a bracketing interval. Terminates when the bracket is
/// narrower than `xtol + 4 eps |x|`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64, RootError> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if !fa.is_finite() {
        return Err(RootError::NotFinite { x: a });
    }
    if !fb.is_finite() {
        return Err(RootError::NotFinite { x: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NoBracket { a, b, fa, fb });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(RootError::NotFinite { x: b });
        }
    }
    Err(RootError::NoConvergence { iters: 200 })
}

/// Secant iteration from two starting points; returns the last iterate once
/// successive iterates differ by less than `xtol`.
pub fn secant<F: FnMut(f64) -> Option<f64>>(
    mut f: F,
    x0: f64,
    x1: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<f64, RootError> {
    let (mut xa, mut xb) = (x0, x1);
    let mut fa = f(xa).ok_or(RootError::NotFinite { x: xa })?;
    let mut fb = f(xb).ok_or(RootError::NotFinite { x: xb })?;
    for _ in 0..max_iter {
        if fb == 0.0 {
            return Ok(xb);
        }
        let denom = fb - fa;
        if denom == 0.0 {
            return Err(RootError::NoConvergence { iters: max_iter });
        }
        let xn = xb - fb * (xb - xa) / denom;
        if (xn - xb).abs() <= xtol {
            return Ok(xn);
        }
        xa = xb;
        fa = fb;
        xb = xn;
        fb = f(xb).ok_or(RootError::NotFinite { x: xb })?;
    }
    Err(RootError::NoConvergence { iters: max_iter })
}
