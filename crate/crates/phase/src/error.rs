use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhaseError {
    #[error("consumption reached output away from the steady state near t = {t}")]
    SingularDrift { t: f64 },
    #[error("capital left the policy domain [{lo}, {hi}] at t = {t} (k = {k})")]
    DomainExit { t: f64, k: f64, lo: f64, hi: f64 },
    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
