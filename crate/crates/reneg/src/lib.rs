//! Every `k̄` in the steady-state interval carries its own equilibrium. This
//! crate tabulates the value `V(k₀, k̄)` of starting at `k₀` under the
//! equilibrium converging to `k̄`, and picks the steady state that no local
//! renegotiation can improve upon.

mod error;
mod select;
mod surface;

pub use error::RenegError;
pub use select::{lrp_select, lrp_sweep, renegotiation_derivative, SweepPoint};
pub use surface::{fd_renegotiation_derivative, value_surface, SurfaceOptions, ValueSurface};
