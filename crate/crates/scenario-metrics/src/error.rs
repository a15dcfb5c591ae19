use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("empty trajectory passed to dtw")]
    EmptyTrajectory,
    #[error("empty set: {0}")]
    EmptySet(&'static str),
    #[error("hungarian requires a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),
    #[error("fraction must be in (0,1], got {0}")]
    BadFraction(f64),
    #[error("empty matched-distance list")]
    EmptyMatches,
    #[error("sets too small for protocol: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, MetricsError>;
