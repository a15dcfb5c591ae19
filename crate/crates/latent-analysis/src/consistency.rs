//! Cluster-vs-rule-label agreement: purity and the refinement property
//! (every predicted cluster sits inside exactly one truth class).

use crate::dbscan::{ClusterLabels, NOISE};
use crate::error::{AnalysisError, Result};
use std::collections::BTreeMap;
use trajectory_core::ScenarioLabel;

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    /// Fraction of non-noise points whose cluster's majority class they share.
    pub purity: f64,
    /// (cluster id, truth label) -> count, noise excluded.
    pub contingency: BTreeMap<(i32, &'static str), usize>,
    /// True iff every predicted cluster maps into exactly one truth class.
    pub refinement: bool,
    pub noise: usize,
}

pub fn cluster_consistency(
    pred: &ClusterLabels,
    truth: &[ScenarioLabel],
) -> Result<ConsistencyReport> {
    if pred.labels.len() != truth.len() {
        return Err(AnalysisError::LengthMismatch {
            left: pred.labels.len(),
            right: truth.len(),
        });
    }
    let mut contingency: BTreeMap<(i32, &'static str), usize> = BTreeMap::new();
    let mut noise = 0usize;
    for (&cluster, &label) in pred.labels.iter().zip(truth) {
        if cluster == NOISE {
            noise += 1;
            continue;
        }
        *contingency.entry((cluster, label.tag())).or_insert(0) += 1;
    }
    let mut per_cluster: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (&(cluster, _), &count) in &contingency {
        per_cluster.entry(cluster).or_default().push(count);
    }
    let non_noise: usize = per_cluster.values().flatten().sum();
    let majority_sum: usize = per_cluster
        .values()
        .map(|counts| counts.iter().copied().max().unwrap_or(0))
        .sum();
    let refinement = per_cluster.values().all(|counts| counts.len() == 1);
    Ok(ConsistencyReport {
        purity: if non_noise > 0 {
            majority_sum as f64 / non_noise as f64
        } else {
            0.0
        },
        contingency,
        refinement,
        noise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(v: Vec<i32>) -> ClusterLabels {
        ClusterLabels {
            labels: v,
            eps: 1.0,
            min_neighbors: 3,
        }
    }

    use trajectory_core::ScenarioLabel::{CutIn, DriveByLeft, DriveByRight};

    #[test]
    fn perfect_prediction_purity_one_refinement_true() {
        let pred = labels(vec![0, 0, 1, 1, 2, 2]);
        let truth = vec![CutIn, CutIn, DriveByLeft, DriveByLeft, DriveByRight, DriveByRight];
        let report = cluster_consistency(&pred, &truth).unwrap();
        assert_eq!(report.purity, 1.0);
        assert!(report.refinement);
        assert_eq!(report.noise, 0);
    }

    #[test]
    fn five_subclusters_inside_three_classes_is_refinement() {
        // The finer-than-truth outcome: multiple clusters per class, none
        // straddling two classes.
        let pred = labels(vec![0, 0, 1, 1, 2, 2, 3, 3, 4, 4]);
        let truth = vec![
            CutIn, CutIn, CutIn, CutIn, DriveByLeft, DriveByLeft, DriveByLeft, DriveByLeft,
            DriveByRight, DriveByRight,
        ];
        let report = cluster_consistency(&pred, &truth).unwrap();
        assert!(report.refinement);
        assert_eq!(report.purity, 1.0);
    }

    #[test]
    fn straddling_cluster_breaks_refinement() {
        let pred = labels(vec![0, 0, 0, 1, 1, 1]);
        let truth = vec![CutIn, CutIn, DriveByLeft, DriveByLeft, DriveByLeft, DriveByLeft];
        let report = cluster_consistency(&pred, &truth).unwrap();
        assert!(!report.refinement);
        assert!((report.purity - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn noise_excluded_from_purity() {
        let pred = labels(vec![-1, -1, 0, 0]);
        let truth = vec![CutIn, DriveByLeft, DriveByRight, DriveByRight];
        let report = cluster_consistency(&pred, &truth).unwrap();
        assert_eq!(report.purity, 1.0);
        assert_eq!(report.noise, 2);
    }

    #[test]
    fn length_mismatch_rejected() {
        let pred = labels(vec![0, 1]);
        assert!(cluster_consistency(&pred, &[CutIn]).is_err());
    }
}
