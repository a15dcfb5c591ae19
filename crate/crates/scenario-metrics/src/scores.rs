//! Matching and coverage scores over a pairwise distance matrix, plus the
//! truncated mean of Hungarian-matched distances.

use crate::error::{MetricsError, Result};
use crate::matrix::DistanceMatrix;

/// Mean, over generated samples, of the distance to the nearest real sample.
pub fn matching_score(dm: &DistanceMatrix) -> f64 {
    let m = dm.rows() as f64;
    dm.d.iter()
        .map(|row| row.iter().cloned().fold(f64::INFINITY, f64::min))
        .sum::<f64>()
        / m
}

/// Fraction of real samples that are the nearest neighbor of at least one
/// generated sample. Argmin ties break toward the lowest column index.
pub fn coverage_score(dm: &DistanceMatrix) -> f64 {
    let mut hit = vec![false; dm.cols()];
    for row in &dm.d {
        let mut best = 0usize;
        for (j, &v) in row.iter().enumerate() {
            if v < row[best] {
                best = j;
            }
        }
        hit[best] = true;
    }
    hit.iter().filter(|&&h| h).count() as f64 / dm.cols() as f64
}

/// Mean of the smallest `ceil(fraction * K)` matched distances.
pub fn hungarian_truncated(matched: &[f64], fraction: f64) -> Result<f64> {
    if matched.is_empty() {
        return Err(MetricsError::EmptyMatches);
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(MetricsError::BadFraction(fraction));
    }
    let mut sorted = matched.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = ((fraction * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Ok(sorted[..k].iter().sum::<f64>() / k as f64)
}
