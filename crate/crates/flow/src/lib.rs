//! Capital flows induced by a consumption policy and the functionals built on
//! them: the value along the flow, the one-shot deviation payoff, the
//! integrated and differentiated equilibrium residuals, and the effective
//! discount rate.

mod engine;
mod error;
mod policy;

pub use engine::{Evaluator, FlowResult, FlowSettings, TailClosure};
pub use error::FlowError;
pub use policy::{CandidateValue, PolicyFunction};
