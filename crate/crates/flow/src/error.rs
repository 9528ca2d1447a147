use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("capital {k} lies outside the policy domain [{lo}, {hi}]")]
    OutsideDomain { k: f64, lo: f64, hi: f64 },
    #[error("flow from k = {k0} left the policy domain at t = {t} (K = {k_last}) before settling")]
    Diverged { k0: f64, t: f64, k_last: f64 },
    #[error("flow from k = {k0} did not reach the steady-state neighbourhood by t = {t}")]
    NotSettled { k0: f64, t: f64 },
    #[error("value along the flow from k = {k} is too close to zero for a discount-rate ratio")]
    DegenerateValue { k: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
