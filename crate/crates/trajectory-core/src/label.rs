//! Explicit-rule scenario labeler: the expert-defined extraction rules the
//! clustering pipeline is checked against.

use crate::types::{ScenarioLabel, Trajectory};

pub const DEFAULT_LANE_WIDTH_M: f64 = 3.5;
pub const DEFAULT_DWELL_S: f64 = 2.0;

/// Classifies a trajectory:
/// - cut-in: starts left of the ego lane (lateral >= half lane width), ends
///   inside it, and stays inside for the final `dwell_s` seconds;
/// - drive-by: lateral stays beyond half lane width on one side throughout;
/// - anything else is unknown.
pub fn rule_label(t: &Trajectory, lane_width_m: f64, dwell_s: f64) -> ScenarioLabel {
    let half = lane_width_m / 2.0;
    let n = t.len();
    if n == 0 {
        return ScenarioLabel::Unknown;
    }
    let first = t.points[0].0;
    let last = t.points[n - 1].0;
    let dwell_frames = ((dwell_s * t.sample_rate_hz).round() as usize).clamp(1, n);
    let dwell_inside = t.points[n - dwell_frames..]
        .iter()
        .all(|&(lat, _)| lat.abs() <= half);
    if first >= half && last.abs() <= half && dwell_inside {
        return ScenarioLabel::CutIn;
    }
    if t.lats().all(|lat| lat > half) {
        return ScenarioLabel::DriveByLeft;
    }
    if t.lats().all(|lat| lat < -half) {
        return ScenarioLabel::DriveByRight;
    }
    ScenarioLabel::Unknown
}

pub fn rule_label_default(t: &Trajectory) -> ScenarioLabel {
    rule_label(t, DEFAULT_LANE_WIDTH_M, DEFAULT_DWELL_S)
}
