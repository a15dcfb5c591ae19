//! CLI error kinds mapped onto process exit codes:
//! 2 config error, 3 missing artifact, 4 numeric failure, 1 anything else.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    MissingArtifact(String),
    Numeric(String),
    Other(anyhow::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::MissingArtifact(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::MissingArtifact(msg) => write!(f, "missing artifact: {msg}"),
            CliError::Numeric(msg) => write!(f, "numeric failure: {msg}"),
            CliError::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Other(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.into())
    }
}

impl From<trajectory_core::TrajectoryError> for CliError {
    fn from(e: trajectory_core::TrajectoryError) -> Self {
        CliError::Other(e.into())
    }
}

impl From<neural_core::NeuralError> for CliError {
    fn from(e: neural_core::NeuralError) -> Self {
        match &e {
            neural_core::NeuralError::NonFinite { .. }
            | neural_core::NeuralError::NonFiniteGradient { .. } => {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Other(e.into()),
        }
    }
}

impl From<recurrent_autoencoder::AeError> for CliError {
    fn from(e: recurrent_autoencoder::AeError) -> Self {
        match &e {
            recurrent_autoencoder::AeError::NanAbort { .. } => CliError::Numeric(e.to_string()),
            recurrent_autoencoder::AeError::Neural(inner)
                if matches!(
                    inner,
                    neural_core::NeuralError::NonFinite { .. }
                        | neural_core::NeuralError::NonFiniteGradient { .. }
                ) =>
            {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Other(e.into()),
        }
    }
}

impl From<generators::GanError> for CliError {
    fn from(e: generators::GanError) -> Self {
        match &e {
            generators::GanError::NanAbort { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Other(e.into()),
        }
    }
}

impl From<scenario_metrics::MetricsError> for CliError {
    fn from(e: scenario_metrics::MetricsError) -> Self {
        CliError::Other(e.into())
    }
}

impl From<latent_analysis::AnalysisError> for CliError {
    fn from(e: latent_analysis::AnalysisError) -> Self {
        CliError::Other(e.into())
    }
}

/// Fails with exit code 3 when a pipeline prerequisite is absent, naming the
/// command that produces it.
pub fn require_artifact(path: &std::path::Path, producer: &str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::MissingArtifact(format!(
            "{} not found; produce it first with `{producer}`",
            path.display()
        )))
    }
}
