use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("capital must be positive, got {0}")]
    NonPositiveCapital(f64),
}
