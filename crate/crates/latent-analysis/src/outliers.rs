//! Soft outlier scoring from autoencoder reconstruction losses: the
//! probability of being an outlier is the loss exponential normalized by the
//! maximal-loss trajectory, computed in shifted form exp(l - l_max) so large
//! losses cannot overflow.

use crate::error::{AnalysisError, Result};
use rayon::prelude::*;
use recurrent_autoencoder::AeModel;
use trajectory_core::{Dataset, Trajectory};

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierScore {
    pub id: String,
    pub loss: f64,
    /// In (0,1]; exactly 1 for the maximal-loss trajectory.
    pub prob: f64,
}

/// Converts reconstruction losses to outlier probabilities, descending.
pub fn outlier_probabilities(losses: &[(String, f64)]) -> Result<Vec<OutlierScore>> {
    if losses.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    for (id, loss) in losses {
        if !loss.is_finite() || *loss < 0.0 {
            return Err(AnalysisError::NegativeLoss { id: id.clone() });
        }
    }
    let max_loss = losses
        .iter()
        .map(|(_, l)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut scores: Vec<OutlierScore> = losses
        .iter()
        .map(|(id, loss)| OutlierScore {
            id: id.clone(),
            loss: *loss,
            prob: (loss - max_loss).exp(),
        })
        .collect();
    scores.sort_by(|a, b| b.prob.partial_cmp(&a.prob).unwrap());
    Ok(scores)
}

/// Scores every trajectory of a normalized dataset by reconstruction loss
/// and returns the top `k` with their probabilities (all, if k exceeds the
/// dataset size).
pub fn top_outliers(
    ds: &Dataset,
    ae: &AeModel,
    k: usize,
) -> Result<Vec<(Trajectory, OutlierScore)>> {
    if ds.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let losses: Vec<(String, f64)> = ds
        .trajectories
        .par_iter()
        .map(|t| Ok((t.id.clone(), ae.reconstruction_loss(t)?)))
        .collect::<Result<_>>()?;
    let scores = outlier_probabilities(&losses)?;
    let by_id: std::collections::HashMap<&str, &Trajectory> =
        ds.iter().map(|t| (t.id.as_str(), t)).collect();
    Ok(scores
        .into_iter()
        .take(k)
        .map(|s| ((*by_id[s.id.as_str()]).clone(), s))
        .collect())
}
