//! Generative models for driving trajectories: a GAN (standard or WGAN-GP,
//! MLP or ResNet) over autoencoder latents with length-estimated decoding,
//! and a length-conditioned recurrent GAN emitting trajectories directly.

pub mod error;
pub mod latent_gan;
pub mod rcgan;
pub mod report;

pub use error::{GanError, Result};
pub use latent_gan::{
    autodiff_input_gradient, fd_input_gradient, generate_trajectories, gradient_penalty,
    sample_latent, train_latent_gan, GanArch, GanMode, LatentGanConfig, LatentGanModel,
};
pub use rcgan::{sample_rcgan, train_rcgan, RcganConfig, RcganModel};
pub use report::{GanIterStats, GanTrainReport, SampleSnapshot};
