use growth_flow::FlowError;
use growth_og::OgError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenegError {
    #[error("steady state {k_bar} is not inside the interval ({lo}, {hi})")]
    OutsideInterval { k_bar: f64, lo: f64, hi: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Og(#[from] OgError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}
