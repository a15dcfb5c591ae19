//! Density-based clustering with explicit noise labels.

use crate::error::{AnalysisError, Result};
use crate::pca::Embedding;

pub const NOISE: i32 = -1;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterLabels {
    /// Cluster id per input point, contiguous from 0; -1 marks noise.
    pub labels: Vec<i32>,
    pub eps: f64,
    pub min_neighbors: usize,
}

impl ClusterLabels {
    pub fn cluster_count(&self) -> usize {
        self.labels
            .iter()
            .filter(|&&l| l >= 0)
            .map(|&l| l as usize + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == NOISE).count()
    }
}

/// Standard DBSCAN over Euclidean distance. Neighborhood counts include the
/// point itself; border points join the first core cluster that reaches
/// them; density-unreachable points stay noise.
pub fn dbscan(embedding: &Embedding, eps: f64, min_neighbors: usize) -> Result<ClusterLabels> {
    if eps <= 0.0 {
        return Err(AnalysisError::InvalidParameter("eps must be positive".into()));
    }
    if min_neighbors < 1 {
        return Err(AnalysisError::InvalidParameter(
            "min_neighbors must be at least 1".into(),
        ));
    }
    let pts = &embedding.coords;
    let n = pts.len();
    let eps2 = eps * eps;
    let neighbors = |i: usize| -> Vec<usize> {
        (0..n)
            .filter(|&j| {
                pts[i]
                    .iter()
                    .zip(&pts[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    <= eps2
            })
            .collect()
    };

    const UNVISITED: i32 = -2;
    let mut labels = vec![UNVISITED; n];
    let mut cluster = 0i32;
    for i in 0..n {
        if labels[i] != UNVISITED {
            continue;
        }
        let hood = neighbors(i);
        if hood.len() < min_neighbors {
            labels[i] = NOISE;
            continue;
        }
        labels[i] = cluster;
        let mut queue: std::collections::VecDeque<usize> = hood.into_iter().collect();
        while let Some(j) = queue.pop_front() {
            if labels[j] == NOISE {
                // Border point reached from a core: joins this cluster.
                labels[j] = cluster;
            }
            if labels[j] != UNVISITED {
                continue;
            }
            labels[j] = cluster;
            let jhood = neighbors(j);
            if jhood.len() >= min_neighbors {
                queue.extend(jhood);
            }
        }
        cluster += 1;
    }
    Ok(ClusterLabels {
        labels,
        eps,
        min_neighbors,
    })
}
