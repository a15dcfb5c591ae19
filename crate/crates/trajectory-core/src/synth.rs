//! Synthetic scenario source. Stands in for proprietary sensor logs: cut-ins
//! follow a smooth monotone lateral transition into the ego lane, drive-bys
//! hold an adjacent lane while sweeping longitudinally.

use crate::error::{Result, TrajectoryError};
use crate::types::{ScenarioLabel, Trajectory, SAMPLE_RATE_HZ};
use neural_core::Prng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub lane_offset_m: f64,
    pub lon_range_m: (f64, f64),
    pub accel_range_mps2: (f64, f64),
    pub noise_std_m: f64,
    pub length_range: (usize, usize),
    pub decel_fraction: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            lane_offset_m: 3.5,
            lon_range_m: (10.0, 120.0),
            accel_range_mps2: (-1.5, 1.5),
            noise_std_m: 0.15,
            length_range: (30, 70),
            decel_fraction: 0.15,
        }
    }
}

impl SynthParams {
    pub fn noiseless(mut self) -> Self {
        self.noise_std_m = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.lon_range_m.0 >= self.lon_range_m.1 {
            return Err(TrajectoryError::InvalidParams("lon_range min >= max".into()));
        }
        if self.accel_range_mps2.0 >= self.accel_range_mps2.1 {
            return Err(TrajectoryError::InvalidParams(
                "accel_range min >= max".into(),
            ));
        }
        if self.length_range.0 >= self.length_range.1 {
            return Err(TrajectoryError::InvalidParams(
                "length_range min >= max".into(),
            ));
        }
        if self.noise_std_m < 0.0 {
            return Err(TrajectoryError::InvalidParams("negative noise_std".into()));
        }
        if !(0.0..=1.0).contains(&self.decel_fraction) {
            return Err(TrajectoryError::InvalidParams(
                "decel_fraction outside [0,1]".into(),
            ));
        }
        Ok(())
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Frames a cut-in must already spend inside the ego lane before the
/// trajectory ends (2 s at 10 Hz).
const CUTIN_DWELL_FRAMES: usize = 20;

/// Draws one scenario of the requested kind. Pure function of
/// (kind, params, rng state): the same seeded stream reproduces the same
/// trajectory, id included.
pub fn synth_scenario(kind: ScenarioLabel, params: &SynthParams, rng: &mut Prng) -> Trajectory {
    let id = format!("{}_{:016x}", kind.tag(), rng.next_u64());
    let (len_min, len_max) = params.length_range;
    let n = len_min + rng.below(len_max - len_min + 1);
    let dt = 1.0 / SAMPLE_RATE_HZ;
    let horizon = (n - 1) as f64 * dt;

    let lats: Vec<f64>;
    let lons: Vec<f64>;
    match kind {
        ScenarioLabel::CutIn => {
            lats = cutin_lateral(n, params.lane_offset_m, rng);
            lons = trending_longitudinal(n, horizon, params, rng);
        }
        ScenarioLabel::DriveByLeft | ScenarioLabel::DriveByRight => {
            let side = if kind == ScenarioLabel::DriveByLeft {
                1.0
            } else {
                -1.0
            };
            lats = driveby_lateral(n, side * params.lane_offset_m, rng);
            lons = sweeping_longitudinal(n, horizon, params, rng);
        }
        ScenarioLabel::Unknown => {
            // Aborted cut-in: dips into the ego lane mid-trajectory and
            // retreats, so the rule labeler can classify it as neither.
            lats = aborted_cutin_lateral(n, params.lane_offset_m, rng);
            lons = trending_longitudinal(n, horizon, params, rng);
        }
    }

    let points: Vec<(f64, f64)> = lats
        .into_iter()
        .zip(lons)
        .map(|(lat, lon)| {
            if params.noise_std_m > 0.0 {
                (
                    lat + params.noise_std_m * rng.normal(),
                    lon + params.noise_std_m * rng.normal(),
                )
            } else {
                (lat, lon)
            }
        })
        .collect();

    Trajectory::new(id, points, Some(kind)).expect("synthetic points are finite")
}

/// Monotone logistic transition from `lane_offset` to 0, normalized so the
/// endpoints are exact, settled inside the lane for the final dwell window.
fn cutin_lateral(n: usize, lane_offset: f64, rng: &mut Prng) -> Vec<f64> {
    let settle = (n - 1).saturating_sub(CUTIN_DWELL_FRAMES).max(4) as f64;
    let mid = rng.range(0.25, 0.6) * settle;
    let tau = (rng.range(0.08, 0.16) * settle).max(0.5);
    let raw = |t: f64| sigmoid((mid - t) / tau);
    let (r0, r_end) = (raw(0.0), raw((n - 1) as f64));
    (0..n)
        .map(|t| {
            // Ratio first so both endpoints are bit-exact (1.0 and 0.0).
            let unit = (raw(t as f64) - r_end) / (r0 - r_end);
            lane_offset * unit
        })
        .collect()
}

/// Adjacent-lane lateral track: lane offset plus a slow bounded wobble.
fn driveby_lateral(n: usize, center: f64, rng: &mut Prng) -> Vec<f64> {
    let amp = rng.range(0.0, 0.4);
    let cycles = rng.range(0.25, 1.0);
    let phase = rng.range(0.0, std::f64::consts::TAU);
    (0..n)
        .map(|t| {
            let x = t as f64 / n as f64;
            center + center.signum() * amp * (std::f64::consts::TAU * cycles * x + phase).sin()
        })
        .collect()
}

/// Dips to the lane center around the middle and returns to the start lane.
fn aborted_cutin_lateral(n: usize, lane_offset: f64, rng: &mut Prng) -> Vec<f64> {
    let mid = rng.range(0.35, 0.65) * (n - 1) as f64;
    let width = rng.range(0.08, 0.18) * (n - 1) as f64;
    (0..n)
        .map(|t| {
            let z = (t as f64 - mid) / width;
            lane_offset * (1.0 - (-z * z).exp())
        })
        .collect()
}

/// Affine-plus-acceleration longitudinal track whose overall trend is
/// negative with probability `decel_fraction`; endpoints stay in a plausible
/// ahead-of-ego band.
fn trending_longitudinal(n: usize, horizon: f64, params: &SynthParams, rng: &mut Prng) -> Vec<f64> {
    let (lo, hi) = params.lon_range_m;
    // Two-draw minimum biases starts toward the near region.
    let start = lo + (hi - lo) * rng.uniform().min(rng.uniform());
    let decel = rng.uniform() < params.decel_fraction;
    let magnitude = rng.range(2.0, 40.0);
    let target = if decel {
        (start - magnitude).max(2.0)
    } else {
        (start + magnitude).min(hi)
    };
    let accel = rng.range(params.accel_range_mps2.0, params.accel_range_mps2.1);
    let v = if horizon > 0.0 {
        (target - start - 0.5 * accel * horizon * horizon) / horizon
    } else {
        0.0
    };
    (0..n)
        .map(|t| {
            let time = t as f64 / SAMPLE_RATE_HZ;
            start + v * time + 0.5 * accel * time * time
        })
        .collect()
}

/// Linear sweep covering a sizable slice of the longitudinal range, either
/// direction.
fn sweeping_longitudinal(n: usize, horizon: f64, params: &SynthParams, rng: &mut Prng) -> Vec<f64> {
    let (lo, hi) = params.lon_range_m;
    let width = hi - lo;
    let span = rng.range(0.3, 0.9) * width;
    let forward = rng.uniform() < 0.5;
    let start = if forward {
        rng.range(lo, hi - span)
    } else {
        rng.range(lo + span, hi)
    };
    let v = if horizon > 0.0 {
        (if forward { span } else { -span }) / horizon
    } else {
        0.0
    };
    (0..n)
        .map(|t| start + v * (t as f64 / SAMPLE_RATE_HZ))
        .collect()
}
