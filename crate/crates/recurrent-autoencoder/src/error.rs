use thiserror::Error;

#[derive(Debug, Error)]
pub enum AeError {
    #[error(transparent)]
    Neural(#[from] neural_core::NeuralError),
    #[error(transparent)]
    Trajectory(#[from] trajectory_core::TrajectoryError),
    #[error("training aborted: non-finite loss at epoch {epoch}")]
    NanAbort { epoch: usize },
    #[error("dataset must be normalized before training (norm_stats missing)")]
    MissingNormStats,
    #[error("not enough data: {0}")]
    InsufficientData(String),
    #[error("requested length {len} outside configured range [{lo},{hi}]")]
    LengthOutOfRange { len: usize, lo: usize, hi: usize },
    #[error("latent size mismatch: model {model}, input {input}")]
    LatentSizeMismatch { model: usize, input: usize },
}

pub type Result<T> = std::result::Result<T, AeError>;
