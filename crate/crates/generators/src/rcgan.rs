//! Length-conditioned recurrent GAN. The generator's LSTM consumes per-step
//! noise plus the scaled length condition and emits one point per step; the
//! bidirectional discriminator scores every step, trained against all-ones
//! (real) or all-zeros (fake) sequences. The emitted sequence always has
//! exactly the conditioned length by construction.

use crate::error::{GanError, Result};
use crate::report::{GanIterStats, GanTrainReport, SampleSnapshot};
use neural_core::{
    bilstm_forward, linear, lstm_stack_forward, AdamState, BoundLstm, LstmParams, ModelCheckpoint,
    NeuralError, NodeId, Prng, Tape, Tensor,
};
use trajectory_core::{batch_by_length, denormalize_points, Dataset, NormStats, Trajectory};

#[derive(Debug, Clone)]
pub struct RcganConfig {
    pub hidden_size: usize,
    pub gen_layers: usize,
    pub noise_dim: usize,
    pub iters: usize,
    pub batch_size: usize,
    pub d_lr: f64,
    pub g_lr: f64,
    pub snapshot_every: usize,
    pub seed: u64,
}

impl Default for RcganConfig {
    fn default() -> Self {
        RcganConfig {
            hidden_size: 48,
            gen_layers: 1,
            noise_dim: 8,
            iters: 3000,
            batch_size: 32,
            d_lr: 1e-3,
            g_lr: 1e-3,
            snapshot_every: 500,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RcganModel {
    pub hidden_size: usize,
    pub noise_dim: usize,
    pub gen_lstm: Vec<LstmParams>,
    pub gen_proj_w: Tensor,
    pub gen_proj_b: Tensor,
    pub disc_fwd: LstmParams,
    pub disc_bwd: LstmParams,
    pub disc_proj_w: Tensor,
    pub disc_proj_b: Tensor,
    pub norm: NormStats,
    pub length_range: (usize, usize),
}

const POINT_FEATURES: usize = 2;

impl RcganModel {
    pub fn init(
        cfg: &RcganConfig,
        norm: NormStats,
        length_range: (usize, usize),
        rng: &mut Prng,
    ) -> Self {
        let mut g_rng = rng.derive("rcgan-generator");
        let mut d_rng = rng.derive("rcgan-discriminator");
        let hs = cfg.hidden_size;
        // Generator input per step: noise + length condition.
        let gen_in = cfg.noise_dim + 1;
        let mut gen_lstm = vec![LstmParams::new(gen_in, hs, &mut g_rng)];
        for _ in 1..cfg.gen_layers.max(1) {
            gen_lstm.push(LstmParams::new(hs, hs, &mut g_rng));
        }
        // Discriminator input per step: point + length condition.
        let disc_in = POINT_FEATURES + 1;
        RcganModel {
            hidden_size: hs,
            noise_dim: cfg.noise_dim,
            gen_proj_w: Tensor::uniform_init(&[hs, POINT_FEATURES], hs, &mut g_rng),
            gen_proj_b: Tensor::zeros(&[1, POINT_FEATURES]),
            gen_lstm,
            disc_fwd: LstmParams::new(disc_in, hs, &mut d_rng),
            disc_bwd: LstmParams::new(disc_in, hs, &mut d_rng),
            disc_proj_w: Tensor::uniform_init(&[2 * hs, 1], 2 * hs, &mut d_rng),
            disc_proj_b: Tensor::zeros(&[1, 1]),
            norm,
            length_range,
        }
    }

    pub fn gen_tensors(&self) -> Vec<&Tensor> {
        let mut v = Vec::new();
        for layer in &self.gen_lstm {
            v.extend(layer.tensors());
        }
        v.extend([&self.gen_proj_w, &self.gen_proj_b]);
        v
    }

    pub fn gen_tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut v: Vec<&mut Tensor> = Vec::new();
        for layer in &mut self.gen_lstm {
            v.extend(layer.tensors_mut());
        }
        v.push(&mut self.gen_proj_w);
        v.push(&mut self.gen_proj_b);
        v
    }

    pub fn disc_tensors(&self) -> Vec<&Tensor> {
        let mut v = self.disc_fwd.tensors();
        v.extend(self.disc_bwd.tensors());
        v.extend([&self.disc_proj_w, &self.disc_proj_b]);
        v
    }

    pub fn disc_tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut v = self.disc_fwd.tensors_mut();
        v.extend(self.disc_bwd.tensors_mut());
        v.push(&mut self.disc_proj_w);
        v.push(&mut self.disc_proj_b);
        v
    }

    /// Length scaled into [0,1] over the trained range.
    pub fn condition(&self, length: usize) -> f64 {
        let (lo, hi) = self.length_range;
        (length as f64 - lo as f64) / (hi as f64 - lo as f64)
    }

    pub fn to_checkpoint(&self) -> ModelCheckpoint {
        let mut ckpt = ModelCheckpoint::new();
        for (i, layer) in self.gen_lstm.iter().enumerate() {
            for (name, t) in layer
                .names(&format!("rcgan.gen{i}."))
                .iter()
                .zip(layer.tensors())
            {
                ckpt.insert_tensor(name, t);
            }
        }
        ckpt.insert_tensor("rcgan.gen_proj.w", &self.gen_proj_w);
        ckpt.insert_tensor("rcgan.gen_proj.b", &self.gen_proj_b);
        for (name, t) in self
            .disc_fwd
            .names("rcgan.disc_fwd.")
            .iter()
            .zip(self.disc_fwd.tensors())
        {
            ckpt.insert_tensor(name, t);
        }
        for (name, t) in self
            .disc_bwd
            .names("rcgan.disc_bwd.")
            .iter()
            .zip(self.disc_bwd.tensors())
        {
            ckpt.insert_tensor(name, t);
        }
        ckpt.insert_tensor("rcgan.disc_proj.w", &self.disc_proj_w);
        ckpt.insert_tensor("rcgan.disc_proj.b", &self.disc_proj_b);
        ckpt.set_meta("rcgan.hidden_size", self.hidden_size);
        ckpt.set_meta("rcgan.noise_dim", self.noise_dim);
        ckpt.set_meta("rcgan.gen_layers", self.gen_lstm.len());
        ckpt.set_meta("norm.mean_lat", self.norm.mean_lat);
        ckpt.set_meta("norm.mean_lon", self.norm.mean_lon);
        ckpt.set_meta("norm.std_lat", self.norm.std_lat);
        ckpt.set_meta("norm.std_lon", self.norm.std_lon);
        ckpt.set_meta("len.min", self.length_range.0);
        ckpt.set_meta("len.max", self.length_range.1);
        ckpt
    }

    pub fn from_checkpoint(ckpt: &ModelCheckpoint) -> Result<Self> {
        let cfg = RcganConfig {
            hidden_size: ckpt.meta_parsed("rcgan.hidden_size")?,
            noise_dim: ckpt.meta_parsed("rcgan.noise_dim")?,
            gen_layers: ckpt.meta_parsed("rcgan.gen_layers")?,
            ..Default::default()
        };
        let norm = NormStats {
            mean_lat: ckpt.meta_parsed("norm.mean_lat")?,
            mean_lon: ckpt.meta_parsed("norm.mean_lon")?,
            std_lat: ckpt.meta_parsed("norm.std_lat")?,
            std_lon: ckpt.meta_parsed("norm.std_lon")?,
        };
        let length_range = (ckpt.meta_parsed("len.min")?, ckpt.meta_parsed("len.max")?);
        let mut model = RcganModel::init(&cfg, norm, length_range, &mut Prng::new(0));
        for (i, layer) in model.gen_lstm.iter_mut().enumerate() {
            for (name, t) in layer
                .names(&format!("rcgan.gen{i}."))
                .clone()
                .iter()
                .zip(layer.tensors_mut())
            {
                *t = ckpt.tensor(name)?;
            }
        }
        model.gen_proj_w = ckpt.tensor("rcgan.gen_proj.w")?;
        model.gen_proj_b = ckpt.tensor("rcgan.gen_proj.b")?;
        for (name, t) in model
            .disc_fwd
            .names("rcgan.disc_fwd.")
            .clone()
            .iter()
            .zip(model.disc_fwd.tensors_mut())
        {
            *t = ckpt.tensor(name)?;
        }
        for (name, t) in model
            .disc_bwd
            .names("rcgan.disc_bwd.")
            .clone()
            .iter()
            .zip(model.disc_bwd.tensors_mut())
        {
            *t = ckpt.tensor(name)?;
        }
        model.disc_proj_w = ckpt.tensor("rcgan.disc_proj.w")?;
        model.disc_proj_b = ckpt.tensor("rcgan.disc_proj.b")?;
        Ok(model)
    }
}

struct BoundGen {
    lstm: Vec<BoundLstm>,
    proj_w: NodeId,
    proj_b: NodeId,
}

impl BoundGen {
    fn param_ids(&self) -> Vec<NodeId> {
        let mut v = Vec::new();
        for l in &self.lstm {
            v.extend(l.param_ids());
        }
        v.extend([self.proj_w, self.proj_b]);
        v
    }
}

struct BoundDisc {
    fwd: BoundLstm,
    bwd: BoundLstm,
    proj_w: NodeId,
    proj_b: NodeId,
}

impl BoundDisc {
    fn param_ids(&self) -> Vec<NodeId> {
        let mut v = self.fwd.param_ids();
        v.extend(self.bwd.param_ids());
        v.extend([self.proj_w, self.proj_b]);
        v
    }
}

fn bind_gen(m: &RcganModel, tape: &mut Tape) -> Result<BoundGen> {
    Ok(BoundGen {
        lstm: m
            .gen_lstm
            .iter()
            .map(|l| l.bind(tape))
            .collect::<neural_core::Result<_>>()?,
        proj_w: tape.leaf(m.gen_proj_w.clone())?,
        proj_b: tape.leaf(m.gen_proj_b.clone())?,
    })
}

fn bind_disc(m: &RcganModel, tape: &mut Tape) -> Result<BoundDisc> {
    Ok(BoundDisc {
        fwd: m.disc_fwd.bind(tape)?,
        bwd: m.disc_bwd.bind(tape)?,
        proj_w: tape.leaf(m.disc_proj_w.clone())?,
        proj_b: tape.leaf(m.disc_proj_b.clone())?,
    })
}

/// Generator rollout: per-step [noise | condition] inputs, one emitted point
/// per step.
fn gen_rollout(
    tape: &mut Tape,
    bound: &BoundGen,
    batch: usize,
    length: usize,
    noise_dim: usize,
    cond: f64,
    rng: &mut Prng,
) -> Result<Vec<NodeId>> {
    let mut steps = Vec::with_capacity(length);
    for _ in 0..length {
        let mut data = Vec::with_capacity(batch * (noise_dim + 1));
        for _ in 0..batch {
            for _ in 0..noise_dim {
                data.push(rng.normal());
            }
            data.push(cond);
        }
        steps.push(tape.leaf(Tensor::from_vec(&[batch, noise_dim + 1], data)?)?);
    }
    let layers: Vec<&BoundLstm> = bound.lstm.iter().collect();
    let traces = lstm_stack_forward(tape, &layers, &steps, None)?;
    let top = &traces.last().unwrap().outputs;
    let mut points = Vec::with_capacity(length);
    for h in top {
        points.push(linear(tape, *h, bound.proj_w, bound.proj_b)?);
    }
    Ok(points)
}

/// Per-step discriminator logits over a sequence of [point | condition]
/// inputs.
fn disc_logits(
    tape: &mut Tape,
    bound: &BoundDisc,
    steps_with_cond: &[NodeId],
) -> Result<Vec<NodeId>> {
    let outs = bilstm_forward(tape, &bound.fwd, &bound.bwd, steps_with_cond)?;
    outs.iter()
        .map(|h| Ok(linear(tape, *h, bound.proj_w, bound.proj_b)?))
        .collect()
}

/// Mean BCE of per-step logits against a constant 0/1 target.
fn sequence_bce(tape: &mut Tape, logits: &[NodeId], target: f64, batch: usize) -> Result<NodeId> {
    let t = Tensor::filled(&[batch, 1], target);
    let mut acc: Option<NodeId> = None;
    for &l in logits {
        let b = tape.bce_logits_mean(l, t.clone())?;
        acc = Some(match acc {
            None => b,
            Some(prev) => tape.add(prev, b)?,
        });
    }
    Ok(tape.scale(acc.expect("non-empty sequence"), 1.0 / logits.len() as f64)?)
}

fn append_cond(tape: &mut Tape, steps: &[NodeId], batch: usize, cond: f64) -> Result<Vec<NodeId>> {
    let cond_col = tape.leaf(Tensor::filled(&[batch, 1], cond))?;
    steps
        .iter()
        .map(|&s| Ok(tape.concat_cols(s, cond_col)?))
        .collect()
}

fn nan_at(iter: usize) -> impl Fn(GanError) -> GanError {
    move |e| match e {
        GanError::Neural(NeuralError::NonFinite { .. })
        | GanError::Neural(NeuralError::NonFiniteGradient { .. }) => GanError::NanAbort { iter },
        other => other,
    }
}

/// Trains the RC-GAN on a normalized dataset using length-bucketed batches.
pub fn train_rcgan(ds: &Dataset, cfg: &RcganConfig) -> Result<(RcganModel, GanTrainReport)> {
    if ds.is_empty() {
        return Err(GanError::EmptyDataset);
    }
    let norm = ds.norm_stats.ok_or(GanError::MissingNormStats)?;
    let buckets = batch_by_length(ds);
    let length_range = (
        buckets.first().unwrap().length,
        buckets.last().unwrap().length,
    );
    let root = Prng::new(cfg.seed);
    let mut model = RcganModel::init(cfg, norm, length_range, &mut root.derive("init"));
    let mut report = GanTrainReport::default();
    if cfg.iters == 0 {
        return Ok((model, report));
    }

    // Chunked same-length batches, cycled in reshuffled order.
    let mut chunks: Vec<(usize, Vec<usize>)> = Vec::new();
    for b in &buckets {
        for chunk in b.members.chunks(cfg.batch_size.max(1)) {
            chunks.push((b.length, chunk.to_vec()));
        }
    }
    let mut order_rng = root.derive("batch-order");
    let mut noise_rng = root.derive("noise");
    let mut snap_rng = root.derive("snapshots");
    let mut data_order: Vec<usize> = (0..chunks.len()).collect();
    order_rng.shuffle(&mut data_order);
    let mut cursor = 0usize;

    let mut adam_g = AdamState::new(&model.gen_tensors(), cfg.g_lr).with_betas(0.5, 0.999);
    let mut adam_d = AdamState::new(&model.disc_tensors(), cfg.d_lr).with_betas(0.5, 0.999);

    for iter in 1..=cfg.iters {
        let on_nan = nan_at(iter);
        if cursor == data_order.len() {
            order_rng.shuffle(&mut data_order);
            cursor = 0;
        }
        let (length, members) = &chunks[data_order[cursor]];
        cursor += 1;
        let batch = members.len();
        let cond = model.condition(*length);

        // Real step tensors [B,2] per frame.
        let real_steps_data: Vec<Tensor> = (0..*length)
            .map(|t| {
                let mut data = Vec::with_capacity(batch * POINT_FEATURES);
                for &i in members {
                    let p = ds.trajectories[i].points[t];
                    data.push(p.0);
                    data.push(p.1);
                }
                Tensor::from_vec(&[batch, POINT_FEATURES], data)
            })
            .collect::<neural_core::Result<_>>()?;

        // Discriminator update.
        let d_loss_val = {
            let mut tape = Tape::new();
            let disc = bind_disc(&model, &mut tape)?;
            // Fake points computed off this tape so the generator stays fixed.
            let fake_vals: Vec<Tensor> = {
                let mut gtape = Tape::new();
                let gen = bind_gen(&model, &mut gtape)?;
                let pts = gen_rollout(
                    &mut gtape,
                    &gen,
                    batch,
                    *length,
                    cfg.noise_dim,
                    cond,
                    &mut noise_rng,
                )
                .map_err(&on_nan)?;
                pts.iter().map(|&p| gtape.value(p).clone()).collect()
            };
            let real_ids: Vec<NodeId> = real_steps_data
                .iter()
                .map(|t| tape.leaf(t.clone()))
                .collect::<neural_core::Result<_>>()?;
            let fake_ids: Vec<NodeId> = fake_vals
                .into_iter()
                .map(|t| tape.leaf(t))
                .collect::<neural_core::Result<_>>()?;
            let real_in = append_cond(&mut tape, &real_ids, batch, cond)?;
            let fake_in = append_cond(&mut tape, &fake_ids, batch, cond)?;
            let real_logits = disc_logits(&mut tape, &disc, &real_in).map_err(&on_nan)?;
            let fake_logits = disc_logits(&mut tape, &disc, &fake_in).map_err(&on_nan)?;
            let l_real = sequence_bce(&mut tape, &real_logits, 1.0, batch)?;
            let l_fake = sequence_bce(&mut tape, &fake_logits, 0.0, batch)?;
            let sum = tape.add(l_real, l_fake)?;
            let loss = tape.scale(sum, 0.5)?;
            let val = tape.scalar_value(loss);
            let grads = tape.backward(loss).map_err(GanError::from).map_err(&on_nan)?;
            let gvec: Vec<_> = disc
                .param_ids()
                .iter()
                .zip(model.disc_tensors())
                .map(|(id, p)| grads.get_or_zeros(*id, p.shape()))
                .collect();
            adam_d.step(model.disc_tensors_mut(), &gvec)?;
            val
        };

        // Generator update through the frozen discriminator.
        let g_loss_val = {
            let mut tape = Tape::new();
            let gen = bind_gen(&model, &mut tape)?;
            let disc = bind_disc(&model, &mut tape)?;
            let fake_pts = gen_rollout(
                &mut tape,
                &gen,
                batch,
                *length,
                cfg.noise_dim,
                cond,
                &mut noise_rng,
            )
            .map_err(&on_nan)?;
            let fake_in = append_cond(&mut tape, &fake_pts, batch, cond)?;
            let logits = disc_logits(&mut tape, &disc, &fake_in).map_err(&on_nan)?;
            let loss = sequence_bce(&mut tape, &logits, 1.0, batch)?;
            let val = tape.scalar_value(loss);
            let grads = tape.backward(loss).map_err(GanError::from).map_err(&on_nan)?;
            let gvec: Vec<_> = gen
                .param_ids()
                .iter()
                .zip(model.gen_tensors())
                .map(|(id, p)| grads.get_or_zeros(*id, p.shape()))
                .collect();
            adam_g.step(model.gen_tensors_mut(), &gvec)?;
            val
        };

        report.rows.push(GanIterStats {
            iter,
            d_loss: d_loss_val,
            g_loss: g_loss_val,
            gp: None,
        });
        if cfg.snapshot_every > 0 && iter % cfg.snapshot_every == 0 {
            let mid = (model.length_range.0 + model.length_range.1) / 2;
            let ds = sample_rcgan(&model, mid, 4, &mut snap_rng)?;
            report.snapshots.push(SampleSnapshot {
                iter,
                values: ds
                    .iter()
                    .map(|t| t.points.iter().flat_map(|p| [p.0, p.1]).collect())
                    .collect(),
            });
        }
    }
    Ok((model, report))
}

/// Samples `count` trajectories of exactly `length` frames, denormalized to
/// meters.
pub fn sample_rcgan(
    m: &RcganModel,
    length: usize,
    count: usize,
    rng: &mut Prng,
) -> Result<Dataset> {
    let (lo, hi) = m.length_range;
    if !(lo..=hi).contains(&length) {
        return Err(GanError::LengthOutOfRange { len: length, lo, hi });
    }
    if count == 0 {
        return Ok(Dataset::default());
    }
    let cond = m.condition(length);
    let mut tape = Tape::new();
    let gen = bind_gen(m, &mut tape)?;
    let pts = gen_rollout(&mut tape, &gen, count, length, m.noise_dim, cond, rng)?;
    let mut rows: Vec<Vec<(f64, f64)>> = vec![Vec::with_capacity(length); count];
    for p in pts {
        let v = tape.value(p);
        for (i, row) in rows.iter_mut().enumerate() {
            let r = v.row(i);
            row.push((r[0], r[1]));
        }
    }
    let trajectories: Vec<Trajectory> = rows
        .into_iter()
        .enumerate()
        .map(|(i, normed)| {
            let pts = denormalize_points(&normed, &m.norm);
            Trajectory::new(format!("rcgan_len{length}_{i:04}"), pts, None)
        })
        .collect::<trajectory_core::Result<_>>()?;
    Ok(Dataset::new(trajectories)?)
}
