//! Central finite-difference gradient verification.

use crate::error::Result;
use crate::rng::Prng;
use crate::tensor::Tensor;

/// Relative error with a floor so near-zero gradient pairs compare sanely.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// Checks analytic gradients against central differences on a random
/// subsample of coordinates per parameter; returns the max relative error.
///
/// The closure evaluates the loss at the given parameter values and returns
/// `(loss, analytic gradients aligned with params)`. Finite differencing
/// only uses the loss value.
pub fn grad_check<F>(
    mut f: F,
    params: &[Tensor],
    h: f64,
    max_coords_per_param: usize,
    rng: &mut Prng,
) -> Result<f64>
where
    F: FnMut(&[Tensor]) -> Result<(f64, Vec<Tensor>)>,
{
    let (_, analytic) = f(params)?;
    let mut worst: f64 = 0.0;
    let mut work: Vec<Tensor> = params.to_vec();
    for (pi, param) in params.iter().enumerate() {
        let total = param.len();
        let coords: Vec<usize> = if total <= max_coords_per_param {
            (0..total).collect()
        } else {
            rng.sample_indices(total, max_coords_per_param)
        };
        for ci in coords {
            let orig = param.data()[ci];
            work[pi].data_mut()[ci] = orig + h;
            let (lp, _) = f(&work)?;
            work[pi].data_mut()[ci] = orig - h;
            let (lm, _) = f(&work)?;
            work[pi].data_mut()[ci] = orig;
            let fd = (lp - lm) / (2.0 * h);
            let an = analytic[pi].data()[ci];
            worst = worst.max(rel_err(fd, an));
        }
    }
    Ok(worst)
}
