//! Exploratory analysis over autoencoder latents: PCA/SVD/t-SNE reduction,
//! DBSCAN clustering with noise labels, agreement scoring against the rule
//! labeler, class balancing, and reconstruction-loss outlier screening.

pub mod balance;
pub mod consistency;
pub mod dbscan;
pub mod error;
pub mod linalg;
pub mod outliers;
pub mod pca;
pub mod tsne;

pub use balance::balance_by_label;
pub use consistency::{cluster_consistency, ConsistencyReport};
pub use dbscan::{dbscan, ClusterLabels, NOISE};
pub use error::{AnalysisError, Result};
pub use linalg::symmetric_eigen;
pub use outliers::{outlier_probabilities, top_outliers, OutlierScore};
pub use pca::{pca_fit_transform, svd_transform, Embedding, Method};
pub use tsne::{tsne_embed, TsneConfig};
