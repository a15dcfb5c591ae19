//! Dense symmetric eigendecomposition via cyclic Jacobi rotations. At latent
//! dimensions (<= 128) this is exact to machine precision and fast.

/// Returns (eigenvalues, eigenvectors) sorted by descending eigenvalue;
/// `eigenvectors[k]` is the unit eigenvector for `eigenvalues[k]`.
pub fn symmetric_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();

    let off = |a: &Vec<Vec<f64>>| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            for j in (i + 1)..d {
                s += a[i][j] * a[i][j];
            }
        }
        s
    };
    let scale: f64 = matrix
        .iter()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        if off(&a) <= 1e-26 * scale {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| (0..d).map(|row| v[row][col]).collect())
        .collect();
    (eigenvalues, eigenvectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use neural_core::Prng;

    #[test]
    fn diagonal_matrix_eigen() {
        let m = vec![
            vec![3.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ];
        let (vals, vecs) = symmetric_eigen(&m);
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        assert!((vals[2] - 1.0).abs() < 1e-12);
        assert!((vecs[0][0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_pairs_satisfy_definition() {
        let mut rng = Prng::new(4);
        let d = 8;
        // Random symmetric PSD matrix B^T B.
        let b: Vec<Vec<f64>> = (0..d)
            .map(|_| (0..d).map(|_| rng.range(-1.0, 1.0)).collect())
            .collect();
        let mut m = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in 0..d {
                m[i][j] = (0..d).map(|k| b[k][i] * b[k][j]).sum();
            }
        }
        let (vals, vecs) = symmetric_eigen(&m);
        for (lambda, vec) in vals.iter().zip(&vecs) {
            // A v = lambda v
            for i in 0..d {
                let av: f64 = (0..d).map(|j| m[i][j] * vec[j]).sum();
                assert!((av - lambda * vec[i]).abs() < 1e-9, "residual too large");
            }
            let norm: f64 = vec.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-10);
        }
        // Trace preserved.
        let trace: f64 = (0..d).map(|i| m[i][i]).sum();
        assert!((vals.iter().sum::<f64>() - trace).abs() < 1e-9);
    }
}
