use growth_flow::FlowError;
use growth_model::ModelError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OgError {
    #[error("technology has constant marginal product; no interior steady-state interval")]
    UnsupportedTechnology,
    #[error("steady state {k_bar} lies outside the admissible interval ({lo}, {hi})")]
    InadmissibleSteadyState { k_bar: f64, lo: f64, hi: f64 },
    #[error("x - ln(1+x) = {0} has no solution")]
    NoBranchSolution(f64),
    #[error("integration stopped at the domain edge k = {k}")]
    DomainEdge { k: f64 },
    #[error("policy rejected: {0}")]
    PolicyRejected(String),
    #[error("start-up offsets did not agree: discrepancy {discrepancy:e} after {halvings} halvings")]
    SeedDisagreement { discrepancy: f64, halvings: usize },
    #[error("stability computations disagree: closed form {closed}, numerical {numerical}")]
    Diagnostics { closed: f64, numerical: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}
