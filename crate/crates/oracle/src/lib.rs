//! Reference solutions with known closed forms, used to test the numerical
//! machinery end to end.
//!
//! With `f(k) = A k`, log utility and a discount factor that switches from
//! `e^{-δ₀t}` to `e^{-δ₁t}` at `τ`, both the naive and the equilibrium
//! consumption rules are linear in capital.

mod error;
mod hjb;
mod linear;

pub use error::OracleError;
pub use hjb::{hjb_constant_discount_check, HjbCheck};
pub use linear::{
    de_linear_slope, footnote_g, hjb_example_residual, ie_linear_slope, linear_equilibrium_policy, linear_naive_policy,
    pinned_offset, LinearCase,
};
