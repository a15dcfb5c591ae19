//! Set-level comparison of trajectory collections: DTW distances, the
//! pairwise matrix, matching and coverage scores, Hungarian one-to-one
//! matching with its truncated mean, and the repeated-run protocol with a
//! real-set baseline.

pub mod dtw;
pub mod error;
pub mod hungarian;
pub mod matrix;
pub mod protocol;
pub mod scores;

pub use dtw::{dtw, dtw_points};
pub use error::{MetricsError, Result};
pub use hungarian::{hungarian, matched_distances};
pub use matrix::{pairwise_matrix, DistanceMatrix};
pub use protocol::{baseline_split_eval, evaluate_sets, EvalConfig, EvalReport, EvalStats, Summary};
pub use scores::{coverage_score, hungarian_truncated, matching_score};
