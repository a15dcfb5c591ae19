use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("empty input")]
    EmptyInput,
    #[error("invalid component count k={k} for {n} samples of dimension {dim}")]
    BadComponents { k: usize, n: usize, dim: usize },
    #[error("perplexity {perplexity} too large for {n} samples (need 3*perplexity < n)")]
    PerplexityTooLarge { perplexity: f64, n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("length mismatch: {left} labels vs {right} truths")]
    LengthMismatch { left: usize, right: usize },
    #[error("negative loss for {id:?}")]
    NegativeLoss { id: String },
    #[error(transparent)]
    Ae(#[from] recurrent_autoencoder::AeError),
    #[error(transparent)]
    Trajectory(#[from] trajectory_core::TrajectoryError),
}

pub type Result<T> = std::result::Result<T, AnalysisError>;
