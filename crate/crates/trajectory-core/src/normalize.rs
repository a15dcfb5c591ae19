//! Global per-feature z-scoring shared by every model in a pipeline.

use crate::error::{Result, TrajectoryError};
use crate::types::{Dataset, NormStats};

const STD_FLOOR: f64 = 1e-8;

/// Population mean/std over all points of all trajectories.
pub fn fit_normalization(ds: &Dataset) -> Result<NormStats> {
    if ds.is_empty() {
        return Err(TrajectoryError::EmptyDataset);
    }
    let n: usize = ds.iter().map(|t| t.len()).sum();
    if n < 2 {
        return Err(TrajectoryError::InsufficientData { need: 2, got: n });
    }
    let nf = n as f64;
    let (mut sum_lat, mut sum_lon) = (0.0, 0.0);
    for t in ds.iter() {
        for &(lat, lon) in &t.points {
            sum_lat += lat;
            sum_lon += lon;
        }
    }
    let mean_lat = sum_lat / nf;
    let mean_lon = sum_lon / nf;
    let (mut var_lat, mut var_lon) = (0.0, 0.0);
    for t in ds.iter() {
        for &(lat, lon) in &t.points {
            var_lat += (lat - mean_lat).powi(2);
            var_lon += (lon - mean_lon).powi(2);
        }
    }
    Ok(NormStats {
        mean_lat,
        mean_lon,
        std_lat: (var_lat / nf).sqrt().max(STD_FLOOR),
        std_lon: (var_lon / nf).sqrt().max(STD_FLOOR),
    })
}

pub fn normalize(ds: &Dataset, stats: &NormStats) -> Dataset {
    let mut out = ds.clone();
    for t in &mut out.trajectories {
        for p in &mut t.points {
            p.0 = (p.0 - stats.mean_lat) / stats.std_lat;
            p.1 = (p.1 - stats.mean_lon) / stats.std_lon;
        }
    }
    out.norm_stats = Some(*stats);
    out
}

pub fn denormalize(ds: &Dataset, stats: &NormStats) -> Dataset {
    let mut out = ds.clone();
    for t in &mut out.trajectories {
        for p in &mut t.points {
            p.0 = p.0 * stats.std_lat + stats.mean_lat;
            p.1 = p.1 * stats.std_lon + stats.mean_lon;
        }
    }
    out.norm_stats = None;
    out
}

/// Normalizes a bare point list with the same convention.
pub fn normalize_points(points: &[(f64, f64)], stats: &NormStats) -> Vec<(f64, f64)> {
    points
        .iter()
        .map(|&(lat, lon)| {
            (
                (lat - stats.mean_lat) / stats.std_lat,
                (lon - stats.mean_lon) / stats.std_lon,
            )
        })
        .collect()
}

pub fn denormalize_points(points: &[(f64, f64)], stats: &NormStats) -> Vec<(f64, f64)> {
    points
        .iter()
        .map(|&(lat, lon)| {
            (
                lat * stats.std_lat + stats.mean_lat,
                lon * stats.std_lon + stats.mean_lon,
            )
        })
        .collect()
}
