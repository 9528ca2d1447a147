use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FiscalError {
    #[error("interest rate f'(K) = {rate} is not positive at t = {t}")]
    InvalidPrice { t: f64, rate: f64 },
    #[error("root not found: {0}")]
    RootNotFound(String),
    #[error("{0}")]
    Diagnostics(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
