use growth_flow::FlowError;
use growth_model::ModelError;
use growth_numerics::RootError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid case: {0}")]
    InvalidCase(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Root(#[from] RootError),
}
