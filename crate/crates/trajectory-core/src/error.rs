use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error("line {line}: unknown label {label:?}")]
    UnknownLabel { line: usize, label: String },
    #[error("trajectory {id:?} has {len} points, outside [{lo},{hi}]")]
    LengthOutOfRange {
        id: String,
        len: usize,
        lo: usize,
        hi: usize,
    },
    #[error("trajectory {id:?}: {reason}")]
    InvalidTrajectory { id: String, reason: String },
    #[error("duplicate trajectory id {0:?}")]
    DuplicateId(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("need at least {need} points to fit normalization, got {got}")]
    InsufficientData { need: usize, got: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TrajectoryError>;
