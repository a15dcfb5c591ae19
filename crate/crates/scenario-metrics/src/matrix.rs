//! Pairwise DTW distance matrix between a generated set and a real set.

use crate::dtw::dtw;
use crate::error::{MetricsError, Result};
use rayon::prelude::*;
use trajectory_core::Dataset;

/// M x N matrix of distances from generated-set rows to real-set columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    pub d: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    pub fn new(row_ids: Vec<String>, col_ids: Vec<String>, d: Vec<Vec<f64>>) -> Result<Self> {
        if d.len() != row_ids.len() || d.iter().any(|r| r.len() != col_ids.len()) {
            return Err(MetricsError::InvalidMatrix(
                "dimensions disagree with id lists".into(),
            ));
        }
        for ids in [&row_ids, &col_ids] {
            let mut seen = std::collections::HashSet::new();
            if !ids.iter().all(|id| seen.insert(id)) {
                return Err(MetricsError::InvalidMatrix("duplicate ids".into()));
            }
        }
        if d.iter().flatten().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(MetricsError::InvalidMatrix(
                "entries must be finite and non-negative".into(),
            ));
        }
        Ok(DistanceMatrix { row_ids, col_ids, d })
    }

    pub fn rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn cols(&self) -> usize {
        self.col_ids.len()
    }

    /// Square submatrix restricted to the first `n` rows and all columns.
    pub fn take_rows(&self, n: usize) -> DistanceMatrix {
        DistanceMatrix {
            row_ids: self.row_ids[..n].to_vec(),
            col_ids: self.col_ids.clone(),
            d: self.d[..n].to_vec(),
        }
    }
}

/// Computes `d[i][j] = dtw(gs[i], rs[j])`. Cells are independent, so rows run
/// in parallel; assembly order is fixed by index, making the result
/// deterministic.
pub fn pairwise_matrix(gs: &Dataset, rs: &Dataset) -> Result<DistanceMatrix> {
    if gs.is_empty() {
        return Err(MetricsError::EmptySet("generated"));
    }
    if rs.is_empty() {
        return Err(MetricsError::EmptySet("real"));
    }
    let d: Vec<Vec<f64>> = gs
        .trajectories
        .par_iter()
        .map(|g| {
            rs.trajectories
                .iter()
                .map(|r| dtw(g, r))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    DistanceMatrix::new(
        gs.iter().map(|t| t.id.clone()).collect(),
        rs.iter().map(|t| t.id.clone()).collect(),
        d,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use neural_core::Prng;
    use trajectory_core::Trajectory;

    fn random_dataset(prefix: &str, count: usize, rng: &mut Prng) -> Dataset {
        Dataset::new(
            (0..count)
                .map(|i| {
                    let n = 3 + rng.below(10);
                    Trajectory::new(
                        format!("{prefix}{i}"),
                        (0..n)
                            .map(|_| (rng.range(-4.0, 4.0), rng.range(0.0, 50.0)))
                            .collect(),
                        None,
                    )
                    .unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_identical_pair_gives_zero() {
        let mut rng = Prng::new(1);
        let ds = random_dataset("a", 1, &mut rng);
        let mut other = ds.clone();
        other.trajectories[0].id = "b0".into();
        let dm = pairwise_matrix(&ds, &other).unwrap();
        assert_eq!(dm.d, vec![vec![0.0]]);
    }

    #[test]
    fn self_matrix_has_zero_diagonal() {
        let mut rng = Prng::new(2);
        let ds = random_dataset("t", 5, &mut rng);
        let dm = pairwise_matrix(&ds, &ds).unwrap();
        for i in 0..5 {
            assert_eq!(dm.d[i][i], 0.0);
        }
    }

    #[test]
    fn parallel_matches_sequential_oracle() {
        let mut rng = Prng::new(3);
        let gs = random_dataset("g", 5, &mut rng);
        let rs = random_dataset("r", 4, &mut rng);
        let dm = pairwise_matrix(&gs, &rs).unwrap();
        for (i, g) in gs.iter().enumerate() {
            for (j, r) in rs.iter().enumerate() {
                assert_eq!(dm.d[i][j], dtw(g, r).unwrap());
            }
        }
    }

    #[test]
    fn empty_set_rejected() {
        let mut rng = Prng::new(4);
        let ds = random_dataset("x", 2, &mut rng);
        assert!(pairwise_matrix(&Dataset::default(), &ds).is_err());
        assert!(pairwise_matrix(&ds, &Dataset::default()).is_err());
    }
}
