//! Core data model: trajectories, labels, datasets, normalization stats.

use crate::error::{Result, TrajectoryError};

/// Frames per second of every trajectory in this workspace.
pub const SAMPLE_RATE_HZ: f64 = 10.0;

/// Length bounds (frames) enforced on dataset ingest: 3 to 7 seconds at 10 Hz.
pub const MIN_FRAMES: usize = 30;
pub const MAX_FRAMES: usize = 70;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioLabel {
    CutIn,
    DriveByLeft,
    DriveByRight,
    Unknown,
}

impl ScenarioLabel {
    pub fn tag(self) -> &'static str {
        match self {
            ScenarioLabel::CutIn => "cutin",
            ScenarioLabel::DriveByLeft => "driveby_left",
            ScenarioLabel::DriveByRight => "driveby_right",
            ScenarioLabel::Unknown => "unknown",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "cutin" => Some(ScenarioLabel::CutIn),
            "driveby_left" => Some(ScenarioLabel::DriveByLeft),
            "driveby_right" => Some(ScenarioLabel::DriveByRight),
            "unknown" => Some(ScenarioLabel::Unknown),
            _ => None,
        }
    }
}

/// One tracked-object trajectory: (lateral, longitudinal) positions in meters
/// relative to the ego vehicle, sampled at 10 Hz. Positive lateral is left of
/// the ego.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub id: String,
    pub points: Vec<(f64, f64)>,
    pub label: Option<ScenarioLabel>,
    pub sample_rate_hz: f64,
}

impl Trajectory {
    /// Builds a trajectory, checking coordinates are finite and non-empty.
    /// Length bounds are an ingest concern, not a construction one, so unit
    /// tests can build short sequences.
    pub fn new(
        id: impl Into<String>,
        points: Vec<(f64, f64)>,
        label: Option<ScenarioLabel>,
    ) -> Result<Self> {
        let id = id.into();
        if points.is_empty() {
            return Err(TrajectoryError::InvalidTrajectory {
                id,
                reason: "no points".into(),
            });
        }
        if points.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(TrajectoryError::InvalidTrajectory {
                id,
                reason: "non-finite coordinate".into(),
            });
        }
        Ok(Trajectory {
            id,
            points,
            label,
            sample_rate_hz: SAMPLE_RATE_HZ,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lats(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn lons(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }
}

/// Per-feature z-score statistics, shared globally by every model trained on
/// a dataset. Population (divide-by-n) convention; stds floored at 1e-8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormStats {
    pub mean_lat: f64,
    pub mean_lon: f64,
    pub std_lat: f64,
    pub std_lon: f64,
}

impl NormStats {
    pub fn identity() -> Self {
        NormStats {
            mean_lat: 0.0,
            mean_lon: 0.0,
            std_lat: 1.0,
            std_lon: 1.0,
        }
    }
}

/// An owned collection of trajectories with unique ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub trajectories: Vec<Trajectory>,
    pub norm_stats: Option<NormStats>,
}

impl Dataset {
    pub fn new(trajectories: Vec<Trajectory>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for t in &trajectories {
            if !seen.insert(t.id.as_str()) {
                return Err(TrajectoryError::DuplicateId(t.id.clone()));
            }
        }
        Ok(Dataset {
            trajectories,
            norm_stats: None,
        })
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Trajectory> {
        self.trajectories.iter()
    }

    /// Dataset restricted to the given indices (cloned members).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            trajectories: indices
                .iter()
                .map(|&i| self.trajectories[i].clone())
                .collect(),
            norm_stats: self.norm_stats,
        }
    }
}

/// All trajectories of one exact frame count, referenced by index into the
/// parent dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthBatch {
    pub length: usize,
    pub members: Vec<usize>,
}
