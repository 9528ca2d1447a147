use serde::{Deserialize, Serialize};

use crate::ModelError;

/// Production function `f(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Technology {
    /// `f(k) = A k`.
    Linear { productivity: f64 },
    /// `f(k) = A k^α`, `0 < α < 1`.
    CobbDouglas { level: f64, alpha: f64 },
}

impl Technology {
    pub fn linear(productivity: f64) -> Result<Self, ModelError> {
        if !(productivity.is_finite() && productivity > 0.0) {
            return Err(ModelError::InvalidParameter(format!("productivity must be positive, got {productivity}")));
        }
        Ok(Technology::Linear { productivity })
    }

    pub fn cobb_douglas(level: f64, alpha: f64) -> Result<Self, ModelError> {
        if !(level.is_finite() && level > 0.0) {
            return Err(ModelError::InvalidParameter(format!("level must be positive, got {level}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ModelError::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(Technology::CobbDouglas { level, alpha })
    }

    /// Re-checks parameters of a value built without a constructor (for
    /// example by deserialization).
    pub fn validated(self) -> Result<Self, ModelError> {
        match self {
            Technology::Linear { productivity } => Self::linear(productivity),
            Technology::CobbDouglas { level, alpha } => Self::cobb_douglas(level, alpha),
        }
    }

    /// `(f(k), f'(k))`; rejects non-positive capital.
    pub fn eval(&self, k: f64) -> Result<(f64, f64), ModelError> {
        if !(k > 0.0) {
            return Err(ModelError::NonPositiveCapital(k));
        }
        Ok((self.output(k), self.marginal(k)))
    }

    pub fn output(&self, k: f64) -> f64 {
        match *self {
            Technology::Linear { productivity } => productivity * k,
            Technology::CobbDouglas { level, alpha } => level * k.powf(alpha),
        }
    }

    pub fn marginal(&self, k: f64) -> f64 {
        match *self {
            Technology::Linear { productivity } => productivity,
            Technology::CobbDouglas { level, alpha } => level * alpha * k.powf(alpha - 1.0),
        }
    }

    pub fn second(&self, k: f64) -> f64 {
        match *self {
            Technology::Linear { .. } => 0.0,
            Technology::CobbDouglas { level, alpha } => level * alpha * (alpha - 1.0) * k.powf(alpha - 2.0),
        }
    }

    pub fn is_strictly_concave(&self) -> bool {
        matches!(self, Technology::CobbDouglas { .. })
    }

    /// Capital level with `f'(k) = r`, when it exists.
    pub fn marginal_inverse(&self, r: f64) -> Option<f64> {
        match *self {
            Technology::Linear { .. } => None,
            Technology::CobbDouglas { level, alpha } => {
                (r > 0.0).then(|| (alpha * level / r).powf(1.0 / (1.0 - alpha)))
            }
        }
    }

    /// Taylor coefficients of `f(k̄ + z)` in `z`.
    pub fn taylor(&self, k_bar: f64, n: usize) -> Vec<f64> {
        let mut c = vec![0.0; n];
        match *self {
            Technology::Linear { productivity } => {
                if n > 0 {
                    c[0] = productivity * k_bar;
                }
                if n > 1 {
                    c[1] = productivity;
                }
            }
            Technology::CobbDouglas { level, alpha } => {
                let f0 = level * k_bar.powf(alpha);
                if n > 0 {
                    c[0] = f0;
                }
                for j in 1..n {
                    c[j] = c[j - 1] * (alpha - (j - 1) as f64) / (j as f64 * k_bar);
                }
            }
        }
        c
    }
}
