//! Linear dimensionality reduction: PCA on the centered covariance and SVD
//! directions of the uncentered data matrix.

use crate::error::{AnalysisError, Result};
use crate::linalg::symmetric_eigen;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Pca,
    Svd,
    Tsne,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Pca => "pca",
            Method::Svd => "svd",
            Method::Tsne => "tsne",
        }
    }
}

/// Low-dimensional coordinates aligned with the input row order.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub coords: Vec<Vec<f64>>,
    pub method: Method,
    pub dim: usize,
}

fn check_input(x: &[Vec<f64>], k: usize) -> Result<usize> {
    if x.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let dim = x[0].len();
    if k < 1 || k >= dim || x.len() <= k {
        return Err(AnalysisError::BadComponents {
            k,
            n: x.len(),
            dim,
        });
    }
    Ok(dim)
}

/// Mean-centered projection onto the top-k covariance eigenvectors. Returns
/// the embedding and per-component fractions of total variance (descending,
/// summing to at most one).
pub fn pca_fit_transform(x: &[Vec<f64>], k: usize) -> Result<(Embedding, Vec<f64>)> {
    let dim = check_input(x, k)?;
    let n = x.len() as f64;
    let mut mean = vec![0.0; dim];
    for row in x {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut cov = vec![vec![0.0; dim]; dim];
    for row in x {
        for i in 0..dim {
            let di = row[i] - mean[i];
            for j in i..dim {
                cov[i][j] += di * (row[j] - mean[j]);
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            cov[i][j] /= n;
            cov[j][i] = cov[i][j];
        }
    }
    let (eigenvalues, eigenvectors) = symmetric_eigen(&cov);
    let total: f64 = eigenvalues.iter().map(|v| v.max(0.0)).sum();
    let explained: Vec<f64> = eigenvalues
        .iter()
        .take(k)
        .map(|&v| if total > 0.0 { v.max(0.0) / total } else { 0.0 })
        .collect();
    let coords = project(x, &mean, &eigenvectors[..k]);
    Ok((
        Embedding {
            coords,
            method: Method::Pca,
            dim: k,
        },
        explained,
    ))
}

/// Projection onto the top-k right singular directions of the uncentered
/// data matrix. Returns the embedding and the singular values (descending).
pub fn svd_transform(x: &[Vec<f64>], k: usize) -> Result<(Embedding, Vec<f64>)> {
    let dim = check_input(x, k)?;
    let mut gram = vec![vec![0.0; dim]; dim];
    for row in x {
        for i in 0..dim {
            for j in i..dim {
                gram[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            gram[j][i] = gram[i][j];
        }
    }
    let (eigenvalues, eigenvectors) = symmetric_eigen(&gram);
    let singular: Vec<f64> = eigenvalues
        .iter()
        .take(k)
        .map(|&v| v.max(0.0).sqrt())
        .collect();
    let zero_mean = vec![0.0; dim];
    let coords = project(x, &zero_mean, &eigenvectors[..k]);
    Ok((
        Embedding {
            coords,
            method: Method::Svd,
            dim: k,
        },
        singular,
    ))
}

fn project(x: &[Vec<f64>], mean: &[f64], components: &[Vec<f64>]) -> Vec<Vec<f64>> {
    x.iter()
        .map(|row| {
            components
                .iter()
                .map(|comp| {
                    row.iter()
                        .zip(mean)
                        .zip(comp)
                        .map(|((v, m), c)| (v - m) * c)
                        .sum()
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use neural_core::Prng;

    #[test]
    fn axis_aligned_data_recovers_axes() {
        // Variance 4 along x, 1 along y: components align with axes up to sign.
        let mut rng = Prng::new(1);
        let x: Vec<Vec<f64>> = (0..200)
            .map(|_| vec![2.0 * rng.normal(), rng.normal(), 0.0])
            .collect();
        let (emb, explained) = pca_fit_transform(&x, 2).unwrap();
        assert_eq!(emb.dim, 2);
        assert!(explained[0] > explained[1]);
        // First coordinate should be highly correlated with raw x.
        let corr: f64 = x
            .iter()
            .zip(&emb.coords)
            .map(|(raw, e)| raw[0] * e[0])
            .sum();
        assert!(corr.abs() > 100.0);
    }

    #[test]
    fn rank_one_data_explains_everything_with_first_component() {
        let mut rng = Prng::new(2);
        let dir = [0.6, -0.8, 0.0];
        let x: Vec<Vec<f64>> = (0..50)
            .map(|_| {
                let t = rng.range(-3.0, 3.0);
                dir.iter().map(|d| d * t).collect()
            })
            .collect();
        let (_, explained) = pca_fit_transform(&x, 1).unwrap();
        assert!((explained[0] - 1.0).abs() < 1e-9, "{}", explained[0]);
    }

    #[test]
    fn variance_fractions_match_full_eigendecomposition_oracle() {
        let mut rng = Prng::new(3);
        let dim = 10;
        let x: Vec<Vec<f64>> = (0..120)
            .map(|_| (0..dim).map(|j| rng.normal() * (j + 1) as f64).collect())
            .collect();
        let (_, explained) = pca_fit_transform(&x, 4).unwrap();

        // Independent oracle: full covariance eigendecomposition computed
        // here, fractions from all eigenvalues.
        let n = x.len() as f64;
        let mut mean = vec![0.0; dim];
        for row in &x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v / n;
            }
        }
        let mut cov = vec![vec![0.0; dim]; dim];
        for row in &x {
            for i in 0..dim {
                for j in 0..dim {
                    cov[i][j] += (row[i] - mean[i]) * (row[j] - mean[j]) / n;
                }
            }
        }
        let (vals, vecs) = symmetric_eigen(&cov);
        let total: f64 = vals.iter().sum();
        for (frac, val) in explained.iter().zip(&vals) {
            assert!((frac - val / total).abs() < 1e-9);
        }
        // Reconstruction from all components equals the input.
        for row in x.iter().take(10) {
            let centered: Vec<f64> = row.iter().zip(&mean).map(|(v, m)| v - m).collect();
            let proj: Vec<f64> = vecs
                .iter()
                .map(|c| centered.iter().zip(c).map(|(a, b)| a * b).sum())
                .collect();
            for i in 0..dim {
                let recon: f64 = vecs.iter().zip(&proj).map(|(c, p)| c[i] * p).sum::<f64>() + mean[i];
                assert!((recon - row[i]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn svd_on_centered_data_matches_pca_up_to_sign() {
        let mut rng = Prng::new(5);
        let dim = 6;
        let raw: Vec<Vec<f64>> = (0..80)
            .map(|_| (0..dim).map(|j| rng.normal() * (1.0 + j as f64)).collect())
            .collect();
        let n = raw.len() as f64;
        let mut mean = vec![0.0; dim];
        for row in &raw {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v / n;
            }
        }
        let centered: Vec<Vec<f64>> = raw
            .iter()
            .map(|row| row.iter().zip(&mean).map(|(v, m)| v - m).collect())
            .collect();
        let (pca_emb, _) = pca_fit_transform(&centered, 2).unwrap();
        let (svd_emb, singular) = svd_transform(&centered, 2).unwrap();
        assert!(singular[0] >= singular[1]);
        for j in 0..2 {
            // Column matches up to a global sign.
            let dot: f64 = pca_emb
                .coords
                .iter()
                .zip(&svd_emb.coords)
                .map(|(p, s)| p[j] * s[j])
                .sum();
            let sign = dot.signum();
            for (p, s) in pca_emb.coords.iter().zip(&svd_emb.coords) {
                assert!((p[j] - sign * s[j]).abs() < 1e-7, "{} vs {}", p[j], s[j]);
            }
        }
    }

    #[test]
    fn zero_matrix_gives_zero_embedding() {
        let x = vec![vec![0.0; 4]; 10];
        let (emb, singular) = svd_transform(&x, 2).unwrap();
        assert!(emb.coords.iter().flatten().all(|&v| v == 0.0));
        assert!(singular.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn component_count_bounds_enforced() {
        let x = vec![vec![1.0, 2.0, 3.0]; 10];
        assert!(pca_fit_transform(&x, 3).is_err());
        assert!(pca_fit_transform(&x, 0).is_err());
        assert!(pca_fit_transform(&[], 1).is_err());
    }
}
