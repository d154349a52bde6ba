use thiserror::Error;

/// Errors surfaced by the world model.
#[derive(Debug, Error)]
pub enum EnvError {
    /// A configuration invariant is violated; the message names it.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A runtime input fell outside an operation's domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An assigned transmission with zero rate cannot complete.
    #[error("degenerate transmission: assigned task with zero rate")]
    DegenerateRate,

    /// Caller broke an API contract (shape/ordering/assignment rules).
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, EnvError>;
