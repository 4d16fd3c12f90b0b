use netpart_milp::MilpError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("state has {got} entries, problem has {expected}")]
    StateSize { expected: usize, got: usize },
    #[error("instance exceeds oracle limits: {0}")]
    OracleLimit(String),
    #[error("iteration cap of {0} reached without convergence")]
    IterationCap(u64),
    #[error("separator contract violated: {0}")]
    Contract(String),
    #[error(transparent)]
    Solver(#[from] MilpError),
}
