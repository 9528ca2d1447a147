//! Economic primitives: discount kernels, utility, technology and the
//! overlapping-generations parameter bundle.
//!
//! All types validate their parameters on construction and are immutable
//! afterwards.

mod economy;
mod error;
mod kernel;
mod technology;
mod utility;

pub use economy::OgEconomy;
pub use error::ModelError;
pub use kernel::{DiscountKernel, ExpPiece, ExpSum};
pub use technology::Technology;
pub use utility::Utility;
