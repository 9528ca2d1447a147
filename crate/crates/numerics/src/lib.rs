//! Numerical building blocks shared by the growth-model crates.
//!
//! Everything here is deterministic and allocation-light; none of it knows
//! about economics.

pub mod interp;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod series;

pub use interp::CubicHermite;
pub use ode::{Dopri5, OdeOptions, OdeStatus, Solution};
pub use roots::{brent, RootError};
