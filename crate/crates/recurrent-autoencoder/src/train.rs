//! Autoencoder training loop over shuffled length-bucketed batches.

use crate::error::{AeError, Result};
use crate::model::{leaf_steps, AeModel, FEATURES};
use neural_core::{AdamState, NeuralError, Prng, Tape};
use trajectory_core::{batch_by_length, Dataset};

#[derive(Debug, Clone)]
pub struct AeTrainConfig {
    pub hidden_size: usize,
    pub latent_size: usize,
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub val_fraction: f64,
    pub seed: u64,
}

impl Default for AeTrainConfig {
    fn default() -> Self {
        AeTrainConfig {
            hidden_size: 64,
            latent_size: 32,
            epochs: 60,
            lr: 1e-3,
            batch_size: 64,
            val_fraction: 0.2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

pub type TrainHistory = Vec<EpochStats>;

/// Same-length index chunks of at most `batch_size` drawn from a subset of
/// the dataset.
fn chunked_batches(ds: &Dataset, subset: &[usize], batch_size: usize) -> Vec<Vec<usize>> {
    let mut by_len = std::collections::BTreeMap::<usize, Vec<usize>>::new();
    for &i in subset {
        by_len.entry(ds.trajectories[i].len()).or_default().push(i);
    }
    let mut chunks = Vec::new();
    for members in by_len.values() {
        for chunk in members.chunks(batch_size.max(1)) {
            chunks.push(chunk.to_vec());
        }
    }
    chunks
}

fn batch_rows(ds: &Dataset, chunk: &[usize]) -> Vec<Vec<(f64, f64)>> {
    chunk
        .iter()
        .map(|&i| ds.trajectories[i].points.clone())
        .collect()
}

/// Reconstruction loss of one batch; backward optionally applied via Adam.
fn batch_pass(
    model: &mut AeModel,
    adam: Option<&mut AdamState>,
    rows: &[Vec<(f64, f64)>],
) -> Result<f64> {
    let time = rows[0].len();
    let batch = rows.len();
    let mut tape = Tape::new();
    let bound = model.bind(&mut tape)?;
    let steps = leaf_steps(&mut tape, rows, time)?;
    let (_, outputs) = bound.forward(&mut tape, &steps, batch)?;
    // Per-element MSE over time x batch x features.
    let mut acc = None;
    for (out, target) in outputs.iter().zip(&steps) {
        let d = tape.sub(*out, *target)?;
        let sq = tape.square(d)?;
        let s = tape.sum(sq)?;
        acc = Some(match acc {
            None => s,
            Some(prev) => tape.add(prev, s)?,
        });
    }
    let total = acc.expect("non-empty sequence");
    let loss = tape.scale(total, 1.0 / (time * batch * FEATURES) as f64)?;
    let loss_value = tape.scalar_value(loss);
    if let Some(adam) = adam {
        let grads = tape.backward(loss)?;
        let ids = bound.param_ids();
        let gvec: Vec<_> = ids
            .iter()
            .zip(model.tensors())
            .map(|(id, p)| grads.get_or_zeros(*id, p.shape()))
            .collect();
        adam.step(model.tensors_mut(), &gvec)?;
    }
    Ok(loss_value)
}

fn nan_at(epoch: usize) -> impl Fn(AeError) -> AeError {
    move |e| match e {
        AeError::Neural(NeuralError::NonFinite { .. })
        | AeError::Neural(NeuralError::NonFiniteGradient { .. }) => AeError::NanAbort { epoch },
        other => other,
    }
}

/// Mean per-batch reconstruction loss of a dataset subset, no updates.
pub fn eval_loss(model: &AeModel, ds: &Dataset, subset: &[usize], batch_size: usize) -> Result<f64> {
    let chunks = chunked_batches(ds, subset, batch_size);
    if chunks.is_empty() {
        return Ok(f64::NAN);
    }
    let mut sum = 0.0;
    let mut model = model.clone();
    for chunk in &chunks {
        sum += batch_pass(&mut model, None, &batch_rows(ds, chunk))?;
    }
    Ok(sum / chunks.len() as f64)
}

/// Trains a fresh autoencoder on a normalized dataset. The dataset must
/// already be z-scored (`norm_stats` present) and span at least two distinct
/// lengths.
pub fn train_autoencoder(ds: &Dataset, cfg: &AeTrainConfig) -> Result<(AeModel, TrainHistory)> {
    if ds.is_empty() {
        return Err(AeError::InsufficientData("empty dataset".into()));
    }
    let norm = ds.norm_stats.ok_or(AeError::MissingNormStats)?;
    let buckets = batch_by_length(ds);
    if buckets.len() < 2 {
        return Err(AeError::InsufficientData(
            "need at least two distinct lengths".into(),
        ));
    }
    let length_range = (
        buckets.first().unwrap().length,
        buckets.last().unwrap().length,
    );

    let root = Prng::new(cfg.seed);
    let mut model = AeModel::init(
        cfg.hidden_size,
        cfg.latent_size,
        norm,
        length_range,
        &mut root.derive("model"),
    );

    // Trajectory-level train/validation split.
    let mut order: Vec<usize> = (0..ds.len()).collect();
    root.derive("split").shuffle(&mut order);
    let val_count = ((cfg.val_fraction * ds.len() as f64).round() as usize).clamp(1, ds.len() - 1);
    let (val_idx, train_idx) = order.split_at(val_count);

    let mut adam = AdamState::new(&model.tensors(), cfg.lr);
    let mut history = TrainHistory::new();

    for epoch in 1..=cfg.epochs {
        let mut chunks = chunked_batches(ds, train_idx, cfg.batch_size);
        root.derive(&format!("epoch-{epoch}")).shuffle(&mut chunks);
        let mut train_sum = 0.0;
        for chunk in &chunks {
            train_sum += batch_pass(&mut model, Some(&mut adam), &batch_rows(ds, chunk))
                .map_err(nan_at(epoch))?;
        }
        let train_loss = train_sum / chunks.len() as f64;
        let val_loss = eval_loss(&model, ds, val_idx, cfg.batch_size).map_err(nan_at(epoch))?;
        if !train_loss.is_finite() || !val_loss.is_finite() {
            return Err(AeError::NanAbort { epoch });
        }
        history.push(EpochStats {
            epoch,
            train_loss,
            val_loss,
        });
    }
    Ok((model, history))
}
