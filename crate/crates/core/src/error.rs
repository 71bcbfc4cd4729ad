use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    #[error("precedence graph contains a cycle")]
    Cyclic,

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("enumeration refused: {count} candidate orderings exceed cap {cap}")]
    TooLarge { count: f64, cap: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no bound available: {0}")]
    Unavailable(String),

    #[error("missing data: {0}")]
    Missing(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
