//! Deterministic tensor engine and training substrate: tape-based
//! reverse-mode autodiff over f64 tensors, LSTM / bidirectional LSTM / MLP /
//! residual layers, Adam, finite-difference gradient checking, and a binary
//! checkpoint format. Everything is seeded explicitly and bit-reproducible
//! given (seed, config) on one platform.

pub mod adam;
pub mod checkpoint;
pub mod error;
pub mod gradcheck;
pub mod lstm;
pub mod mlp;
pub mod rng;
pub mod tape;
pub mod tensor;

pub use adam::AdamState;
pub use checkpoint::{CheckpointArray, ModelCheckpoint, FORMAT_VERSION, MAGIC};
pub use error::{NeuralError, Result};
pub use gradcheck::{grad_check, rel_err};
pub use lstm::{bilstm_forward, lstm_stack_forward, BoundLstm, LstmParams, LstmTrace};
pub use mlp::{
    feed_forward_eval, linear, Activation, BoundFeedForward, BoundMlp, BoundResNet, FeedForward,
    MlpParams, ResBlock, ResNetParams, LEAKY_SLOPE,
};
pub use rng::{fnv1a64_bytes, Prng};
pub use tape::{Gradients, NodeId, Tape};
pub use tensor::{matmul_acc, matmul_nn, matmul_nt, matmul_tn, Tensor};
