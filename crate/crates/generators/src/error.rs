use thiserror::Error;

#[derive(Debug, Error)]
pub enum GanError {
    #[error(transparent)]
    Neural(#[from] neural_core::NeuralError),
    #[error(transparent)]
    Ae(#[from] recurrent_autoencoder::AeError),
    #[error(transparent)]
    Trajectory(#[from] trajectory_core::TrajectoryError),
    #[error("training aborted: non-finite value at iteration {iter}")]
    NanAbort { iter: usize },
    #[error("empty latent dataset")]
    EmptyLatents,
    #[error("empty dataset")]
    EmptyDataset,
    #[error("probe spacing h must be positive, got {0}")]
    BadProbeSpacing(f64),
    #[error("latent-space mismatch: {0}")]
    LatentSpaceMismatch(String),
    #[error("requested length {len} outside trained range [{lo},{hi}]")]
    LengthOutOfRange { len: usize, lo: usize, hi: usize },
    #[error("dataset must be normalized (norm_stats missing)")]
    MissingNormStats,
}

pub type Result<T> = std::result::Result<T, GanError>;
