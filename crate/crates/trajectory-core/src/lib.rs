//! Trajectory data model and dataset plumbing for driving-scenario work:
//! JSONL ingest/emit, global z-score normalization, length-bucketed batching,
//! a synthetic scenario source, and the explicit-rule labeler.

pub mod batch;
pub mod error;
pub mod io;
pub mod label;
pub mod normalize;
pub mod synth;
pub mod types;

pub use batch::batch_by_length;
pub use error::{Result, TrajectoryError};
pub use io::{load_dataset, load_dataset_with, save_dataset, IngestOptions};
pub use label::{rule_label, rule_label_default, DEFAULT_DWELL_S, DEFAULT_LANE_WIDTH_M};
pub use normalize::{
    denormalize, denormalize_points, fit_normalization, normalize, normalize_points,
};
pub use synth::{synth_scenario, SynthParams};
pub use types::{
    Dataset, LengthBatch, NormStats, ScenarioLabel, Trajectory, MAX_FRAMES, MIN_FRAMES,
    SAMPLE_RATE_HZ,
};
