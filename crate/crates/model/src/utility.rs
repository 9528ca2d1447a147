use serde::{Deserialize, Serialize};

/// Period utility. Only logarithmic utility is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Utility {
    #[default]
    Log,
}

impl Utility {
    pub fn value(&self, c: f64) -> f64 {
        match self {
            Utility::Log => c.ln(),
        }
    }

    pub fn marginal(&self, c: f64) -> f64 {
        match self {
            Utility::Log => 1.0 / c,
        }
    }

    /// Inverse of the marginal utility.
    pub fn inverse_marginal(&self, y: f64) -> f64 {
        match self {
            Utility::Log => 1.0 / y,
        }
    }

    /// `max_c u(c) + p (y - c)` for shadow price `p > 0` and output `y`.
    pub fn hamiltonian_max(&self, p: f64, y: f64) -> f64 {
        match self {
            Utility::Log => -p.ln() - 1.0 + p * y,
        }
    }
}
