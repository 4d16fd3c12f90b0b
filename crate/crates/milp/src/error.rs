use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MilpError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("simplex failed: {0}")]
    SolverFailure(String),
    #[error("node limit of {0} reached before optimality was proven")]
    NodeLimit(usize),
    #[error("incumbent callback contract violated: {0}")]
    CallbackContract(String),
}
