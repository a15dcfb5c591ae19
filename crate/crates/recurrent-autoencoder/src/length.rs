//! Length estimation from latent vectors: encoding a dataset yields the set
//! of latents X and the set of stored lengths Y; a feed-forward regressor
//! learns Y from X so decoded trajectories can be cut to a plausible length.

use crate::error::{AeError, Result};
use crate::model::{AeModel, LatentVector};
use neural_core::{
    Activation, AdamState, MlpParams, ModelCheckpoint, NeuralError, Prng, Tape, Tensor,
};
use trajectory_core::Dataset;

/// Latent vectors paired with source lengths and ids, stamped with the
/// fingerprint of the producing autoencoder.
#[derive(Debug, Clone)]
pub struct LatentDataset {
    pub x: Vec<LatentVector>,
    pub y: Vec<usize>,
    pub ids: Vec<String>,
    pub length_range: (usize, usize),
    pub ae_fingerprint: u64,
}

impl LatentDataset {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn latent_size(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }
}

/// Encodes every trajectory, grouping equal lengths for batched passes and
/// restoring the original dataset order.
pub fn encode_dataset(model: &AeModel, ds: &Dataset) -> Result<LatentDataset> {
    if ds.is_empty() {
        return Err(AeError::InsufficientData("empty dataset".into()));
    }
    let mut by_len = std::collections::BTreeMap::<usize, Vec<usize>>::new();
    for (i, t) in ds.iter().enumerate() {
        by_len.entry(t.len()).or_default().push(i);
    }
    let mut x: Vec<LatentVector> = vec![Vec::new(); ds.len()];
    for members in by_len.values() {
        for chunk in members.chunks(128) {
            let rows: Vec<Vec<(f64, f64)>> = chunk
                .iter()
                .map(|&i| ds.trajectories[i].points.clone())
                .collect();
            let latents = model.encode_rows(&rows)?;
            for (&i, z) in chunk.iter().zip(latents) {
                x[i] = z;
            }
        }
    }
    Ok(LatentDataset {
        x,
        y: ds.iter().map(|t| t.len()).collect(),
        ids: ds.iter().map(|t| t.id.clone()).collect(),
        length_range: model.length_range,
        ae_fingerprint: model.fingerprint(),
    })
}

#[derive(Debug, Clone)]
pub struct LenTrainConfig {
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub lr: f64,
    /// Multiplicative learning-rate decay applied after each epoch.
    pub lr_decay: f64,
    pub batch_size: usize,
    pub val_fraction: f64,
    pub hidden_activation: Activation,
    pub seed: u64,
}

impl Default for LenTrainConfig {
    fn default() -> Self {
        LenTrainConfig {
            hidden: vec![96, 96],
            epochs: 400,
            lr: 2e-3,
            lr_decay: 1.0,
            batch_size: 64,
            val_fraction: 0.2,
            hidden_activation: Activation::LeakyRelu,
            seed: 0,
        }
    }
}

/// Regression head mapping latents to frame counts. Latent coordinates are
/// standardized with training-set statistics before the MLP; lengths are
/// min-max scaled to [0,1] internally and mapped back to frames on output.
#[derive(Debug, Clone)]
pub struct LenModel {
    pub mlp: MlpParams,
    pub feature_means: Vec<f64>,
    pub feature_stds: Vec<f64>,
    pub length_range: (usize, usize),
    pub ae_fingerprint: u64,
}

impl LenModel {
    fn scale(&self, frames: f64) -> f64 {
        let (lo, hi) = self.length_range;
        (frames - lo as f64) / (hi - lo) as f64
    }

    fn unscale(&self, unit: f64) -> f64 {
        let (lo, hi) = self.length_range;
        lo as f64 + unit * (hi - lo) as f64
    }

    fn standardize(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(self.feature_means.iter().zip(&self.feature_stds))
            .map(|(&v, (&m, &s))| (v - m) / s)
            .collect()
    }

    /// Raw regression output in frames.
    pub fn predict_frames(&self, z: &[f64]) -> Result<f64> {
        let zs = self.standardize(z);
        let mut tape = Tape::new();
        let bound = self.mlp.bind(&mut tape)?;
        let x = tape.leaf(Tensor::from_vec(&[1, zs.len()], zs)?)?;
        let out = bound.forward(&mut tape, x)?;
        Ok(self.unscale(tape.scalar_value(out)))
    }

    /// Regression output rounded to the nearest frame and clamped into the
    /// configured range.
    pub fn estimate_length(&self, z: &[f64]) -> Result<usize> {
        let raw = self.predict_frames(z)?;
        Ok(clamp_frames(raw, self.length_range))
    }

    pub fn to_checkpoint(&self) -> ModelCheckpoint {
        let mut ckpt = ModelCheckpoint::new();
        for (name, tensor) in self.mlp.names("len.").iter().zip(self.mlp.tensors()) {
            ckpt.insert_tensor(name, tensor);
        }
        let widths: Vec<String> = self.mlp.widths.iter().map(ToString::to_string).collect();
        ckpt.set_meta("len.widths", widths.join(","));
        ckpt.set_meta("len.activation", self.mlp.hidden_activation.tag());
        ckpt.insert_array(
            "len.feat_mean",
            vec![self.feature_means.len()],
            self.feature_means.iter().map(|&v| v as f32).collect(),
        );
        ckpt.insert_array(
            "len.feat_std",
            vec![self.feature_stds.len()],
            self.feature_stds.iter().map(|&v| v as f32).collect(),
        );
        ckpt.set_meta("len.min", self.length_range.0);
        ckpt.set_meta("len.max", self.length_range.1);
        ckpt.set_meta("len.ae_fingerprint", self.ae_fingerprint);
        ckpt
    }

    pub fn from_checkpoint(ckpt: &ModelCheckpoint) -> Result<Self> {
        let widths: Vec<usize> = ckpt
            .meta("len.widths")?
            .split(',')
            .map(|w| w.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| {
                AeError::Neural(NeuralError::Checkpoint("bad len.widths metadata".into()))
            })?;
        let act = Activation::from_tag(ckpt.meta("len.activation")?).ok_or_else(|| {
            AeError::Neural(NeuralError::Checkpoint("bad len.activation metadata".into()))
        })?;
        let mut mlp = MlpParams::new(&widths, act, Activation::Linear, &mut Prng::new(0));
        for (name, tensor) in mlp.names("len.").iter().zip(mlp.tensors_mut()) {
            *tensor = ckpt.tensor(name)?;
        }
        Ok(LenModel {
            mlp,
            feature_means: ckpt.tensor("len.feat_mean")?.into_data(),
            feature_stds: ckpt.tensor("len.feat_std")?.into_data(),
            length_range: (ckpt.meta_parsed("len.min")?, ckpt.meta_parsed("len.max")?),
            ae_fingerprint: ckpt.meta_parsed("len.ae_fingerprint")?,
        })
    }
}

/// Rounds a raw frame estimate and clamps it into range.
pub fn clamp_frames(raw: f64, range: (usize, usize)) -> usize {
    let rounded = raw.round();
    let clamped = rounded.clamp(range.0 as f64, range.1 as f64);
    clamped as usize
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LenEpochStats {
    pub epoch: usize,
    pub train_mse: f64,
    pub val_mse: f64,
}

/// Supervised regression from latents to lengths with a held-out split.
pub fn train_length_estimator(
    ld: &LatentDataset,
    cfg: &LenTrainConfig,
) -> Result<(LenModel, Vec<LenEpochStats>)> {
    if ld.len() < 10 {
        return Err(AeError::InsufficientData(format!(
            "length estimator needs >= 10 latents, got {}",
            ld.len()
        )));
    }
    let latent_size = ld.latent_size();
    let root = Prng::new(cfg.seed);
    let mut widths = vec![latent_size];
    widths.extend(&cfg.hidden);
    widths.push(1);
    let mut order: Vec<usize> = (0..ld.len()).collect();
    root.derive("split").shuffle(&mut order);
    let val_count = ((cfg.val_fraction * ld.len() as f64).round() as usize).clamp(1, ld.len() - 1);
    let (val_idx, train_idx) = order.split_at(val_count);

    // Standardize latent coordinates with training-split statistics.
    let mut feature_means = vec![0.0; latent_size];
    for &i in train_idx {
        for (m, &v) in feature_means.iter_mut().zip(&ld.x[i]) {
            *m += v;
        }
    }
    for m in &mut feature_means {
        *m /= train_idx.len() as f64;
    }
    let mut feature_stds = vec![0.0; latent_size];
    for &i in train_idx {
        for ((sd, &m), &v) in feature_stds.iter_mut().zip(&feature_means).zip(&ld.x[i]) {
            *sd += (v - m) * (v - m);
        }
    }
    for sd in &mut feature_stds {
        *sd = (*sd / train_idx.len() as f64).sqrt();
        // Near-constant coordinates carry no signal; dividing by a tiny std
        // would only amplify f32 storage noise.
        if *sd < 1e-6 {
            *sd = 1.0;
        }
    }

    let mut model = LenModel {
        mlp: MlpParams::new(
            &widths,
            cfg.hidden_activation,
            Activation::Linear,
            &mut root.derive("len-init"),
        ),
        feature_means,
        feature_stds,
        length_range: ld.length_range,
        ae_fingerprint: ld.ae_fingerprint,
    };

    let targets: Vec<f64> = ld.y.iter().map(|&n| model.scale(n as f64)).collect();
    let standardized: Vec<Vec<f64>> = ld.x.iter().map(|z| model.standardize(z)).collect();
    let mut adam = AdamState::new(&model.mlp.tensors(), cfg.lr);
    let mut history = Vec::new();

    let batch_eval = |mlp: &MlpParams, idx: &[usize]| -> Result<f64> {
        let mut tape = Tape::new();
        let bound = mlp.bind(&mut tape)?;
        let (x, t) = gather(&standardized, &targets, idx, latent_size)?;
        let xid = tape.leaf(x)?;
        let tid = tape.leaf(t)?;
        let out = bound.forward(&mut tape, xid)?;
        let loss = tape.mse_mean(out, tid)?;
        Ok(tape.scalar_value(loss))
    };

    for epoch in 1..=cfg.epochs {
        let mut idx = train_idx.to_vec();
        root.derive(&format!("epoch-{epoch}")).shuffle(&mut idx);
        let mut train_sum = 0.0;
        let mut batches = 0usize;
        for chunk in idx.chunks(cfg.batch_size.max(1)) {
            let mut tape = Tape::new();
            let bound = model.mlp.bind(&mut tape)?;
            let (x, t) = gather(&standardized, &targets, chunk, latent_size)?;
            let xid = tape.leaf(x)?;
            let tid = tape.leaf(t)?;
            let out = bound.forward(&mut tape, xid)?;
            let loss = tape.mse_mean(out, tid)?;
            train_sum += tape.scalar_value(loss);
            batches += 1;
            let grads = tape.backward(loss)?;
            let gvec: Vec<_> = bound
                .param_ids()
                .iter()
                .zip(model.mlp.tensors())
                .map(|(id, p)| grads.get_or_zeros(*id, p.shape()))
                .collect();
            adam.step(model.mlp.tensors_mut(), &gvec)?;
        }
        let val_mse = batch_eval(&model.mlp, val_idx)?;
        history.push(LenEpochStats {
            epoch,
            train_mse: train_sum / batches.max(1) as f64,
            val_mse,
        });
        adam.lr *= cfg.lr_decay;
    }
    Ok((model, history))
}

fn gather(
    inputs: &[Vec<f64>],
    targets: &[f64],
    idx: &[usize],
    latent_size: usize,
) -> Result<(Tensor, Tensor)> {
    let mut xdata = Vec::with_capacity(idx.len() * latent_size);
    let mut tdata = Vec::with_capacity(idx.len());
    for &i in idx {
        xdata.extend_from_slice(&inputs[i]);
        tdata.push(targets[i]);
    }
    Ok((
        Tensor::from_vec(&[idx.len(), latent_size], xdata)?,
        Tensor::from_vec(&[idx.len(), 1], tdata)?,
    ))
}
