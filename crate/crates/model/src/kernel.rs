//! Discount kernels represented as finite sums of truncated exponentials,
//! which makes every tail integral available in closed form.

use crate::ModelError;

/// `coef · e^{-rate t}` on the half-open interval `(start, end]`
/// (closed at 0 when `start == 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpPiece {
    pub start: f64,
    pub end: f64,
    pub coef: f64,
    pub rate: f64,
}

impl ExpPiece {
    fn contains(&self, t: f64) -> bool {
        (t > self.start || (t == 0.0 && self.start == 0.0)) && t <= self.end
    }

    /// ∫ over `[max(a, start), end]` of `coef e^{-rate t} e^{g (t - a)}`.
    ///
    /// Requires `rate > g` when the piece is unbounded.
    fn tail_weighted(&self, a: f64, g: f64) -> f64 {
        let lo = a.max(self.start);
        if lo >= self.end {
            return 0.0;
        }
        let r = self.rate - g;
        let base = self.coef * (-self.rate * lo).exp() * (g * (lo - a)).exp();
        if self.end.is_infinite() {
            base / r
        } else {
            let len = self.end - lo;
            if r == 0.0 {
                base * len
            } else {
                base * -(-r * len).exp_m1() / r
            }
        }
    }

    /// ∫ over `[max(a, start), end]` of `coef e^{-rate t} (t - a)`.
    fn tail_moment(&self, a: f64) -> f64 {
        let lo = a.max(self.start);
        if lo >= self.end {
            return 0.0;
        }
        let r = self.rate;
        let base = self.coef * (-r * lo).exp();
        let off = lo - a;
        if self.end.is_infinite() {
            base * (off / r + 1.0 / (r * r))
        } else {
            let len = self.end - lo;
            let e = (-r * len).exp();
            base * (off * -(-r * len).exp_m1() / r + (1.0 - e * (1.0 + r * len)) / (r * r))
        }
    }
}

/// Finite sum of [`ExpPiece`]s.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpSum {
    pub pieces: Vec<ExpPiece>,
}

impl ExpSum {
    pub fn value(&self, t: f64) -> f64 {
        self.pieces.iter().filter(|p| p.contains(t)).map(|p| p.coef * (-p.rate * t).exp()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// ∫_T^∞.
    pub fn tail(&self, t: f64) -> f64 {
        self.weighted_tail(t, 0.0)
    }

    /// ∫_T^∞ of the kernel times `e^{g (t - T)}`; requires `g` below every
    /// unbounded piece's rate.
    pub fn weighted_tail(&self, t: f64, g: f64) -> f64 {
        self.pieces.iter().map(|p| p.tail_weighted(t, g)).sum()
    }

    /// ∫_T^∞ of the kernel times `(t - T)`.
    pub fn moment_tail(&self, t: f64) -> f64 {
        self.pieces.iter().map(|p| p.tail_moment(t)).sum()
    }

    /// ∫_a^b.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.pieces
            .iter()
            .map(|p| {
                let cut = ExpPiece { end: p.end.min(b), ..*p };
                cut.tail_weighted(a, 0.0)
            })
            .sum()
    }

    /// Interior breakpoints (finite piece boundaries other than 0), sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> =
            self.pieces.iter().flat_map(|p| [p.start, p.end]).filter(|x| x.is_finite() && *x > 0.0).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Slowest decay rate among unbounded pieces.
    pub fn slowest_rate(&self) -> Option<f64> {
        self.pieces.iter().filter(|p| p.end.is_infinite()).map(|p| p.rate).min_by(f64::total_cmp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Variant {
    Exponential { rate: f64 },
    PiecewiseExponential { early: f64, late: f64, switch: f64 },
    OgMixture { private: f64, social: f64, death: f64 },
}

/// Discount function `h` with `h(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountKernel {
    variant: Variant,
    sum: ExpSum,
}

fn positive(name: &str, x: f64) -> Result<(), ModelError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter(format!("{name} must be positive and finite, got {x}")))
    }
}

impl DiscountKernel {
    /// `h(t) = e^{-rate t}`.
    pub fn exponential(rate: f64) -> Result<Self, ModelError> {
        positive("rate", rate)?;
        Ok(Self {
            variant: Variant::Exponential { rate },
            sum: ExpSum { pieces: vec![ExpPiece { start: 0.0, end: f64::INFINITY, coef: 1.0, rate }] },
        })
    }

    /// `h(t) = e^{-early t}` for `t ≤ switch` and `e^{-late t}` afterwards.
    ///
    /// With `early > late` the kernel jumps upward at `switch`.
    pub fn piecewise(early: f64, late: f64, switch: f64) -> Result<Self, ModelError> {
        positive("early rate", early)?;
        positive("late rate", late)?;
        if late > early {
            return Err(ModelError::InvalidParameter(format!("late rate {late} must not exceed early rate {early}")));
        }
        if !(switch.is_finite() && switch >= 0.0) {
            return Err(ModelError::InvalidParameter(format!("switch time must be >= 0, got {switch}")));
        }
        let mut pieces = Vec::new();
        if switch > 0.0 {
            pieces.push(ExpPiece { start: 0.0, end: switch, coef: 1.0, rate: early });
        }
        pieces.push(ExpPiece { start: switch, end: f64::INFINITY, coef: 1.0, rate: late });
        Ok(Self { variant: Variant::PiecewiseExponential { early, late, switch }, sum: ExpSum { pieces } })
    }

    /// `h(t) = θ e^{-(δ+π)t} + (1-θ) e^{-ρt}` with `θ = (δ-ρ)/(π+δ-ρ)`.
    ///
    /// `δ = ρ` is accepted and gives the exponential kernel `e^{-ρt}`.
    pub fn og_mixture(private: f64, social: f64, death: f64) -> Result<Self, ModelError> {
        positive("private rate", private)?;
        positive("social rate", social)?;
        positive("death rate", death)?;
        if social > private {
            return Err(ModelError::InvalidParameter(format!(
                "social rate {social} must not exceed private rate {private}"
            )));
        }
        let theta = (private - social) / (death + private - social);
        let mut pieces = Vec::new();
        if theta > 0.0 {
            pieces.push(ExpPiece { start: 0.0, end: f64::INFINITY, coef: theta, rate: private + death });
        }
        pieces.push(ExpPiece { start: 0.0, end: f64::INFINITY, coef: 1.0 - theta, rate: social });
        Ok(Self { variant: Variant::OgMixture { private, social, death }, sum: ExpSum { pieces } })
    }

    /// Weight on the fast exponential of the OG mixture.
    pub fn og_weight(&self) -> Option<f64> {
        match self.variant {
            Variant::OgMixture { private, social, death } => Some((private - social) / (death + private - social)),
            _ => None,
        }
    }

    pub fn is_exponential(&self) -> bool {
        matches!(self.variant, Variant::Exponential { .. })
    }

    /// `h(t)`; rejects negative times.
    pub fn eval(&self, t: f64) -> Result<f64, ModelError> {
        if t < 0.0 || t.is_nan() {
            return Err(ModelError::NegativeTime(t));
        }
        Ok(self.sum.value(t))
    }

    /// `h(t)` for `t ≥ 0` without validation.
    pub fn value(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        self.sum.value(t)
    }

    /// Absolutely continuous part of `h'(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        self.derivative_sum().value(t)
    }

    /// ∫_T^∞ h in closed form.
    pub fn tail_integral(&self, t: f64) -> Result<f64, ModelError> {
        if t < 0.0 || t.is_nan() {
            return Err(ModelError::NegativeTime(t));
        }
        Ok(self.sum.tail(t))
    }

    /// ∫_0^∞ h.
    pub fn total_integral(&self) -> f64 {
        self.sum.tail(0.0)
    }

    pub fn pieces(&self) -> &ExpSum {
        &self.sum
    }

    /// Pieces of the absolutely continuous part of `h'`.
    pub fn derivative_sum(&self) -> ExpSum {
        ExpSum { pieces: self.sum.pieces.iter().map(|p| ExpPiece { coef: -p.rate * p.coef, ..*p }).collect() }
    }

    /// Jumps `h(t+) - h(t)` at interior breakpoints.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        self.sum
            .breakpoints()
            .into_iter()
            .map(|b| {
                let right: f64 = self
                    .sum
                    .pieces
                    .iter()
                    .filter(|p| p.start <= b && b < p.end)
                    .map(|p| p.coef * (-p.rate * b).exp())
                    .sum();
                (b, right - self.sum.value(b))
            })
            .filter(|(_, j)| *j != 0.0)
            .collect()
    }

    /// `-h'(0+)`, the instantaneous discount rate.
    pub fn initial_rate(&self) -> f64 {
        self.sum.pieces.iter().filter(|p| p.start == 0.0).map(|p| p.rate * p.coef).sum()
    }

    /// Pieces of `λ h + h'` with `λ = -h'(0+)`: the part of the discounting
    /// that a single exponential at the instantaneous rate does not capture.
    pub fn nonlocal_sum(&self) -> ExpSum {
        let lam = self.initial_rate();
        ExpSum {
            pieces: self
                .sum
                .pieces
                .iter()
                .filter(|p| p.rate != lam)
                .map(|p| ExpPiece { coef: (lam - p.rate) * p.coef, ..*p })
                .collect(),
        }
    }
}
