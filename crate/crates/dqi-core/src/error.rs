//! Crate-wide error type.

/// Errors raised by instance ingestion, circuit construction, transpilation,
/// and simulation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("no decomposition rule for {gate} into basis {{{basis}}}")]
    UnsupportedDecomposition { gate: String, basis: String },

    #[error("eigensolver did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("postselection has zero probability mass")]
    ZeroPostselection,

    #[error("simulation infeasible: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
