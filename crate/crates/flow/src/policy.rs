use growth_model::Technology;
use growth_numerics::{brent, CubicHermite};

use crate::FlowError;

#[derive(Debug, Clone)]
enum Repr {
    /// `σ(k) = slope · k`.
    Linear {
        slope: f64,
    },
    Grid(CubicHermite),
}

/// Stationary Markov consumption rule `c = σ(k)` on a capital domain.
#[derive(Debug, Clone)]
pub struct PolicyFunction {
    repr: Repr,
    lo: f64,
    hi: f64,
    steady: Option<f64>,
}

impl PolicyFunction {
    /// `σ(k) = slope · k` on `(0, ∞)`.
    pub fn linear(slope: f64) -> Result<Self, FlowError> {
        if !(slope > 0.0 && slope.is_finite()) {
            return Err(FlowError::InvalidArgument(format!("slope must be positive, got {slope}")));
        }
        Ok(Self { repr: Repr::Linear { slope }, lo: 0.0, hi: f64::INFINITY, steady: None })
    }

    /// Monotone cubic Hermite interpolant through `(k_i, σ_i)` with slopes
    /// `σ'_i`. Values must be positive.
    pub fn from_knots(ks: Vec<f64>, sigma: Vec<f64>, slopes: Vec<f64>, steady: Option<f64>) -> Result<Self, FlowError> {
        if ks.len() < 2 || ks.len() != sigma.len() || ks.len() != slopes.len() {
            return Err(FlowError::InvalidArgument("policy grid needs matching arrays of length >= 2".into()));
        }
        if !ks.windows(2).all(|w| w[1] > w[0]) {
            return Err(FlowError::InvalidArgument("policy knots must be strictly increasing".into()));
        }
        if let Some(bad) = sigma.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(FlowError::InvalidArgument(format!("policy values must be positive, got {bad}")));
        }
        let (lo, hi) = (ks[0], ks[ks.len() - 1]);
        if let Some(kb) = steady {
            if !(lo..=hi).contains(&kb) {
                return Err(FlowError::InvalidArgument(format!("steady state {kb} outside [{lo}, {hi}]")));
            }
        }
        let ip = CubicHermite::new(ks, sigma, slopes).monotone();
        Ok(Self { repr: Repr::Grid(ip), lo, hi, steady })
    }

    /// Locates the steady state `f(k) = σ(k)` inside the domain, if exactly
    /// bracketed by a sign change of `f - σ`.
    pub fn with_located_steady_state(mut self, tech: &Technology) -> Self {
        let ip = match &self.repr {
            Repr::Linear { slope } => {
                self.steady = match *tech {
                    Technology::CobbDouglas { level, alpha } => Some((level / slope).powf(1.0 / (1.0 - alpha))),
                    Technology::Linear { .. } => None,
                };
                return self;
            }
            Repr::Grid(ip) => ip,
        };
        let g = |k: f64| tech.output(k) - ip.eval(k);
        let xs = ip.xs();
        self.steady = xs.windows(2).find(|w| g(w[0]) == 0.0 || g(w[0]).signum() != g(w[1]).signum()).and_then(|w| {
            if g(w[0]) == 0.0 {
                Some(w[0])
            } else {
                brent(g, w[0], w[1], 1e-13).ok()
            }
        });
        self
    }

    /// `c · σ`, used to build non-equilibrium comparison policies. The steady
    /// state is dropped.
    pub fn scaled(&self, c: f64) -> Self {
        let repr = match &self.repr {
            Repr::Linear { slope } => Repr::Linear { slope: slope * c },
            Repr::Grid(ip) => Repr::Grid(CubicHermite::new(
                ip.xs().to_vec(),
                ip.ys().iter().map(|y| y * c).collect(),
                ip.slopes().iter().map(|d| d * c).collect(),
            )),
        };
        Self { repr, lo: self.lo, hi: self.hi, steady: None }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn contains(&self, k: f64) -> bool {
        k >= self.lo && k <= self.hi && (k > 0.0)
    }

    pub fn steady_state(&self) -> Option<f64> {
        self.steady
    }

    /// Knots of a grid policy.
    pub fn knots(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Grid(ip) => Some(ip.xs()),
            Repr::Linear { .. } => None,
        }
    }

    pub fn linear_slope(&self) -> Option<f64> {
        match self.repr {
            Repr::Linear { slope } => Some(slope),
            Repr::Grid(_) => None,
        }
    }

    pub fn sigma(&self, k: f64) -> f64 {
        match &self.repr {
            Repr::Linear { slope } => slope * k,
            Repr::Grid(ip) => ip.eval(k),
        }
    }

    pub fn sigma_prime(&self, k: f64) -> f64 {
        match &self.repr {
            Repr::Linear { slope } => *slope,
            Repr::Grid(ip) => ip.deriv(k),
        }
    }

    /// `(σ, σ', σ'')`.
    pub fn eval_all(&self, k: f64) -> (f64, f64, f64) {
        match &self.repr {
            Repr::Linear { slope } => (slope * k, *slope, 0.0),
            Repr::Grid(ip) => ip.eval_all(k),
        }
    }
}

#[derive(Debug, Clone)]
enum ValueRepr {
    /// `v(k) = a ln k + b`.
    LogLinear {
        a: f64,
        b: f64,
    },
    Grid(CubicHermite),
}

/// Candidate equilibrium value `v` with derivative, the object whose
/// envelope condition generates the policy.
#[derive(Debug, Clone)]
pub struct CandidateValue {
    repr: ValueRepr,
}

impl CandidateValue {
    pub fn log_linear(a: f64, b: f64) -> Self {
        Self { repr: ValueRepr::LogLinear { a, b } }
    }

    /// Hermite interpolant with exact slopes `v'_i`.
    pub fn from_knots(ks: Vec<f64>, v: Vec<f64>, vp: Vec<f64>) -> Self {
        Self { repr: ValueRepr::Grid(CubicHermite::new(ks, v, vp)) }
    }

    pub fn value(&self, k: f64) -> f64 {
        match &self.repr {
            ValueRepr::LogLinear { a, b } => a * k.ln() + b,
            ValueRepr::Grid(ip) => ip.eval(k),
        }
    }

    pub fn deriv(&self, k: f64) -> f64 {
        match &self.repr {
            ValueRepr::LogLinear { a, .. } => a / k,
            ValueRepr::Grid(ip) => ip.deriv(k),
        }
    }

    pub fn second(&self, k: f64) -> f64 {
        match &self.repr {
            ValueRepr::LogLinear { a, .. } => -a / (k * k),
            ValueRepr::Grid(ip) => ip.eval_all(k).2,
        }
    }
}
