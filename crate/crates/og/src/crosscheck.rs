//! Independent construction of the left branch from the desingularized
//! system, used to cross-check the value-pair integration.
//!
//! In the rescaled time `s` the steady states form a curve of equilibria
//! `x = 0, v = v̄(k)` with one transverse eigenvalue `δ - f'(k̄) > 0`. The
//! equilibrium orbit lies in the centre manifold `x = h(k, v)`, which
//! attracts in backward `s`. We fit `h` from relaxed orbits, follow the
//! reduced dynamics a short distance from `k̄`, and then integrate the full
//! system backward in `s`.

use growth_flow::PolicyFunction;
use growth_model::OgEconomy;
use growth_numerics::{Dopri5, OdeOptions, OdeStatus};

use crate::seed::stability_closed_form;
use crate::system::desingularized_rhs;
use crate::OgError;

#[derive(Debug, Clone, Copy)]
pub struct CrossCheckOptions {
    /// Length of the reduced-dynamics leg, relative to `1 + k̄`.
    pub reduced_leg: f64,
    /// Backward relaxation time in units of `1/(δ - f'(k̄))`.
    pub relax: f64,
    /// Halvings of the reduced leg allowed when relaxation orbits escape.
    pub max_shrinks: usize,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for CrossCheckOptions {
    fn default() -> Self {
        Self { reduced_leg: 1.5e-3, relax: 40.0, max_shrinks: 8, rtol: 1e-12, atol: 1e-14 }
    }
}

/// Orbit samples `(k, x, v)` with consumption `σ = f/(1+x)`, sorted by `k`.
#[derive(Debug, Clone)]
pub struct DesingularizedOrbit {
    pub k_bar: f64,
    pub ks: Vec<f64>,
    pub xs: Vec<f64>,
    pub vs: Vec<f64>,
    pub sigma: Vec<f64>,
    /// `h ≈ η (c0 + c1 ζ + c2 η)` with `ζ = k - k̄`, `η = v - v̄(k)`.
    pub manifold: [f64; 3],
    /// Capital where the full-system leg starts.
    pub k_start: f64,
}

impl DesingularizedOrbit {
    /// Largest relative gap to `policy` over orbit samples inside its domain.
    pub fn max_relative_gap(&self, policy: &PolicyFunction) -> f64 {
        self.ks
            .iter()
            .zip(&self.sigma)
            .filter(|(k, _)| policy.contains(**k))
            .map(|(k, s)| (policy.sigma(*k) - s).abs() / s)
            .fold(0.0, f64::max)
    }

    /// Number of orbit samples inside the policy domain.
    pub fn overlap(&self, policy: &PolicyFunction) -> usize {
        self.ks.iter().filter(|k| policy.contains(**k)).count()
    }
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        let mut m = a;
        for r in 0..3 {
            m[r][i] = b[r];
        }
        *o = det(m) / d;
    }
    Some(out)
}

/// Left branch of the equilibrium converging to `k_bar`, followed down to
/// `k_end`.
pub fn solve_desingularized(
    econ: &OgEconomy,
    k_bar: f64,
    k_end: f64,
    opts: &CrossCheckOptions,
) -> Result<DesingularizedOrbit, OgError> {
    if econ.is_time_consistent() {
        return Err(OgError::InvalidArgument("the desingularized equilibrium is degenerate when δ = ρ".into()));
    }
    let tech = econ.tech;
    let lam = econ.private_rate - tech.marginal(k_bar);
    if !(lam > 0.0) || !(k_end < k_bar) {
        return Err(OgError::InvalidArgument(format!("need f'(k̄) < δ and k_end < k̄, got k̄ = {k_bar}")));
    }
    let vbar = |k: f64| econ.steady_value(k);
    let backward = |y: &[f64; 3]| -> Option<[f64; 3]> {
        if !(y[0] > -1.0 && y[1] > 0.0) {
            return None;
        }
        let (a, b, c) = desingularized_rhs(econ, y[0], y[1], y[2]);
        Some([-a, -b, -c])
    };
    let solver = Dopri5::new(OdeOptions { rtol: opts.rtol, atol: opts.atol, ..OdeOptions::default() });

    // Relax a cloud of starts onto the centre manifold. On the left branch
    // v lies above v̄ because 1/f(k̄) < v̄'(k̄).
    let vbar_slope = (vbar(k_bar + 1e-6) - vbar(k_bar - 1e-6)) / 2e-6;
    let eta_dir = (vbar_slope - 1.0 / tech.output(k_bar)).signum();
    let s_relax = opts.relax / lam;
    // Off-manifold starts drift along it at a speed proportional to their
    // offset; when that outpaces relaxation (small λ near the lower end of
    // the interval) the cloud and the reduced leg shrink together.
    let fit = |d: f64| -> Option<[f64; 3]> {
        let mut rows: Vec<([f64; 3], f64)> = Vec::new();
        for i in 0..5 {
            let zeta0 = -2.0 * d + 2.5 * d * i as f64 / 4.0;
            for j in 1..=6 {
                let eta0 = eta_dir * 0.5 * d * j as f64 / 6.0;
                let k0 = k_bar + zeta0;
                let sol = solver.integrate(|_, y| backward(y), 0.0, [0.0, k0, vbar(k0) + eta0], s_relax * 1.5);
                if sol.status != OdeStatus::Completed {
                    return None;
                }
                for frac in [1.0, 1.25, 1.5] {
                    let [x, k, v] = sol.eval(s_relax * frac);
                    let (zeta, eta) = (k - k_bar, v - vbar(k));
                    rows.push(([eta, zeta * eta, eta * eta], x));
                }
            }
        }
        let mut ata = [[0.0; 3]; 3];
        let mut atb = [0.0; 3];
        for (a, b) in &rows {
            for r in 0..3 {
                atb[r] += a[r] * b;
                for c in 0..3 {
                    ata[r][c] += a[r] * a[c];
                }
            }
        }
        solve3(ata, atb)
    };
    let mut d = opts.reduced_leg * (1.0 + k_bar);
    let mut coef = None;
    for _ in 0..=opts.max_shrinks {
        coef = fit(d);
        if coef.is_some() {
            break;
        }
        d *= 0.5;
    }
    let coef = coef.ok_or_else(|| OgError::InvalidArgument("centre-manifold fit failed".into()))?;
    let h = |k: f64, v: f64| {
        let (zeta, eta) = (k - k_bar, v - vbar(k));
        eta * (coef[0] + coef[1] * zeta + coef[2] * eta)
    };

    // Reduced dynamics dv/dk = (1 + h)/f from the steady state.
    let reduced = solver.integrate(
        |k, y: &[f64; 1]| Some([(1.0 + h(k, y[0])) / tech.output(k)]),
        k_bar,
        [vbar(k_bar)],
        k_bar - d,
    );
    if reduced.status != OdeStatus::Completed {
        return Err(OgError::DomainEdge { k: reduced.t_end() });
    }
    let k1 = k_bar - d;
    let v1 = reduced.y_end()[0];

    // Rescaled time to leave k̄ by `d` grows like 1/(f x'(k̄)² d); allow ample room.
    let x1 = stability_closed_form(econ, k_bar) / tech.output(k_bar);
    let s_max = 1e4 / (tech.output(k_bar) * x1 * x1 * d);
    let full = solver.integrate_until(|_, y| backward(y), 0.0, [h(k1, v1), k1, v1], s_max, |_, y| y[1] <= k_end);
    if full.status != OdeStatus::Stopped {
        return Err(OgError::DomainEdge { k: full.y_end()[1] });
    }
    let mut pts: Vec<[f64; 3]> = std::iter::once(full.y_start).chain(full.steps.iter().map(|s| s.y1)).collect();
    pts.retain(|p| p[1] >= k_end);
    pts.sort_by(|a, b| a[1].total_cmp(&b[1]));
    Ok(DesingularizedOrbit {
        k_bar,
        ks: pts.iter().map(|p| p[1]).collect(),
        xs: pts.iter().map(|p| p[0]).collect(),
        vs: pts.iter().map(|p| p[2]).collect(),
        sigma: pts.iter().map(|p| tech.output(p[1]) / (1.0 + p[0])).collect(),
        manifold: coef,
        k_start: k1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve3_inverts_a_known_system() {
        let a = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        let x = [1.0, -2.0, 0.5];
        let b = [
            a[0][0] * x[0] + a[0][1] * x[1] + a[0][2] * x[2],
            a[1][0] * x[0] + a[1][1] * x[1] + a[1][2] * x[2],
            a[2][0] * x[0] + a[2][1] * x[1] + a[2][2] * x[2],
        ];
        let got = solve3(a, b).unwrap();
        for i in 0..3 {
            assert!((got[i] - x[i]).abs() < 1e-14);
        }
    }
}
