//! Paths of capital `K`, consumption `C` and unborn welfare `W`.
//!
//! Equilibrium paths are generated from a constructed policy
//! (`K' = f(K) - σ(K)`, `C = σ(K)`, `W = w(K)`), which is regular at the
//! steady state. The autonomous `(K, C, W)` form carries `C/(f - C)` and is
//! used to cross-check those paths.

mod error;
mod sim;

pub use error::PhaseError;
pub use sim::{psi_path, simulate_autonomous, simulate_policy, Provenance, SimOptions, Trajectory};
