//! Recurrent autoencoder for variable-length trajectories: fixed-size latent
//! codes from an LSTM encoder, autoregressive LSTM decoding at a requested
//! length, reconstruction-loss scoring, and the latent-to-length regressor.

pub mod error;
pub mod length;
pub mod model;
pub mod train;

pub use error::{AeError, Result};
pub use length::{
    clamp_frames, encode_dataset, train_length_estimator, LatentDataset, LenEpochStats, LenModel,
    LenTrainConfig,
};
pub use model::{leaf_steps, mse, AeModel, BoundAe, LatentVector, FEATURES};
pub use train::{eval_loss, train_autoencoder, AeTrainConfig, EpochStats, TrainHistory};
