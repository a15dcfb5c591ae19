//! Exact O(n^2) t-SNE with per-point bandwidths found by bisection,
//! symmetrized affinities, early exaggeration, and momentum + adaptive-gain
//! gradient descent on the KL divergence.

use crate::error::{AnalysisError, Result};
use crate::pca::{Embedding, Method};
use neural_core::Prng;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iters: usize,
    pub lr: f64,
    pub early_exaggeration: f64,
    pub exaggeration_iters: usize,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        TsneConfig {
            perplexity: 30.0,
            iters: 1000,
            lr: 200.0,
            early_exaggeration: 12.0,
            exaggeration_iters: 250,
            seed: 0,
        }
    }
}

const OUT_DIM: usize = 2;

/// Embeds the rows of `x` in two dimensions. Returns the embedding and the
/// per-iteration KL divergence of the unexaggerated objective.
pub fn tsne_embed(x: &[Vec<f64>], cfg: &TsneConfig) -> Result<(Embedding, Vec<f64>)> {
    let n = x.len();
    if n == 0 {
        return Err(AnalysisError::EmptyInput);
    }
    if 3.0 * cfg.perplexity >= n as f64 {
        return Err(AnalysisError::PerplexityTooLarge {
            perplexity: cfg.perplexity,
            n,
        });
    }
    if cfg.perplexity <= 1.0 {
        return Err(AnalysisError::InvalidParameter(
            "perplexity must exceed 1".into(),
        ));
    }

    // Pairwise squared distances in the input space, rows in parallel.
    let d2: Vec<Vec<f64>> = x
        .par_iter()
        .map(|xi| {
            x.iter()
                .map(|xj| {
                    xi.iter()
                        .zip(xj)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                })
                .collect()
        })
        .collect();

    // Conditional affinities with bandwidths bisected to the target entropy.
    let target_entropy = cfg.perplexity.ln();
    let p_cond: Vec<Vec<f64>> = d2
        .par_iter()
        .enumerate()
        .map(|(i, row)| conditional_row(i, row, target_entropy))
        .collect();

    // Symmetrize: p_ij = (p_j|i + p_i|j) / 2n, floored for stability.
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            p[i * n + j] = ((p_cond[i][j] + p_cond[j][i]) / (2.0 * n as f64)).max(1e-12);
        }
    }

    let mut rng = Prng::new(cfg.seed).derive("tsne-init");
    let mut y: Vec<f64> = (0..n * OUT_DIM).map(|_| 1e-4 * rng.normal()).collect();
    let mut velocity: Vec<f64> = vec![0.0; n * OUT_DIM];
    let mut gains: Vec<f64> = vec![1.0; n * OUT_DIM];
    let mut kl_history = Vec::with_capacity(cfg.iters);

    for iter in 0..cfg.iters {
        let exaggeration = if iter < cfg.exaggeration_iters {
            cfg.early_exaggeration
        } else {
            1.0
        };
        let momentum = if iter < cfg.exaggeration_iters { 0.5 } else { 0.8 };
        if iter == cfg.exaggeration_iters {
            // The objective changes when exaggeration lifts; stale velocity
            // and gains would overshoot against the new gradient field.
            velocity.iter_mut().for_each(|v| *v = 0.0);
            gains.iter_mut().for_each(|g| *g = 1.0);
        }

        // Student-t numerators and their total.
        let w: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            0.0
                        } else {
                            let mut dist = 0.0;
                            for k in 0..OUT_DIM {
                                let d = y[i * OUT_DIM + k] - y[j * OUT_DIM + k];
                                dist += d * d;
                            }
                            1.0 / (1.0 + dist)
                        }
                    })
                    .collect()
            })
            .collect();
        let z: f64 = w.iter().map(|row| row.iter().sum::<f64>()).sum();

        // Gradient and the true (unexaggerated) KL in one pass.
        let rows: Vec<([f64; OUT_DIM], f64)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut grad = [0.0; OUT_DIM];
                let mut kl = 0.0;
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let pij = p[i * n + j];
                    let wij = w[i][j];
                    let qij = (wij / z).max(1e-12);
                    kl += pij * (pij / qij).ln();
                    let coeff = 4.0 * (exaggeration * pij - qij) * wij;
                    for k in 0..OUT_DIM {
                        grad[k] += coeff * (y[i * OUT_DIM + k] - y[j * OUT_DIM + k]);
                    }
                }
                (grad, kl)
            })
            .collect();
        kl_history.push(rows.iter().map(|(_, kl)| kl).sum());

        for i in 0..n {
            for k in 0..OUT_DIM {
                let idx = i * OUT_DIM + k;
                let g = rows[i].0[k];
                gains[idx] = if g.signum() != velocity[idx].signum() {
                    gains[idx] + 0.2
                } else {
                    (gains[idx] * 0.8).max(0.01)
                };
                velocity[idx] = momentum * velocity[idx] - cfg.lr * gains[idx] * g;
                y[idx] += velocity[idx];
            }
        }
        // Keep the embedding centered.
        for k in 0..OUT_DIM {
            let mean: f64 = (0..n).map(|i| y[i * OUT_DIM + k]).sum::<f64>() / n as f64;
            for i in 0..n {
                y[i * OUT_DIM + k] -= mean;
            }
        }
    }

    let coords: Vec<Vec<f64>> = (0..n)
        .map(|i| y[i * OUT_DIM..(i + 1) * OUT_DIM].to_vec())
        .collect();
    Ok((
        Embedding {
            coords,
            method: Method::Tsne,
            dim: OUT_DIM,
        },
        kl_history,
    ))
}

/// Bisects the Gaussian precision for one point until the conditional
/// distribution's entropy matches ln(perplexity) within 1e-4.
fn conditional_row(i: usize, d2_row: &[f64], target_entropy: f64) -> Vec<f64> {
    let n = d2_row.len();
    let mut beta = 1.0;
    let mut beta_min = f64::NEG_INFINITY;
    let mut beta_max = f64::INFINITY;
    let mut row = vec![0.0; n];
    for _ in 0..200 {
        let mut sum = 0.0;
        for j in 0..n {
            row[j] = if j == i { 0.0 } else { (-beta * d2_row[j]).exp() };
            sum += row[j];
        }
        let mut entropy = 0.0;
        if sum > 0.0 {
            for v in row.iter_mut() {
                *v /= sum;
                if *v > 1e-300 {
                    entropy -= *v * v.ln();
                }
            }
        }
        let diff = entropy - target_entropy;
        if diff.abs() < 1e-4 {
            break;
        }
        if diff > 0.0 {
            beta_min = beta;
            beta = if beta_max.is_infinite() {
                beta * 2.0
            } else {
                (beta + beta_max) / 2.0
            };
        } else {
            beta_max = beta;
            beta = if beta_min.is_infinite() {
                beta / 2.0
            } else {
                (beta + beta_min) / 2.0
            };
        }
    }
    row
}
