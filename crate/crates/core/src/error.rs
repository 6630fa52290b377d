use thiserror::Error;

/// Errors raised when building problems, optimizers or comparison tables.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown problem `{0}` (expected one of ackley, bent_cigar, griewank, rastrigin, rosenbrock, sphere)")]
    UnknownProblem(String),

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
