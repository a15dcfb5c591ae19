//! The recurrent autoencoder: a two-layer LSTM encoder, a linear projection
//! of the final top-layer state (hidden and cell halves) to a fixed-size
//! latent, a bridge that seeds the decoder state from the latent, and a
//! two-layer LSTM decoder rolled out autoregressively from a zero start
//! token. The cell half matters: it integrates over time, so the latent
//! keeps a usable trace of sequence length that the squashed hidden half
//! alone loses.

use crate::error::{AeError, Result};
use neural_core::{
    linear, lstm_stack_forward, BoundLstm, LstmParams, ModelCheckpoint, NodeId, Prng, Tape, Tensor,
};
use trajectory_core::{NormStats, Trajectory};

pub type LatentVector = Vec<f64>;

pub const FEATURES: usize = 2;

#[derive(Debug, Clone)]
pub struct AeModel {
    pub hidden_size: usize,
    pub latent_size: usize,
    pub encoder: Vec<LstmParams>,
    pub latent_w: Tensor,
    pub latent_b: Tensor,
    pub bridge_w: Tensor,
    pub bridge_b: Tensor,
    pub decoder: Vec<LstmParams>,
    pub out_w: Tensor,
    pub out_b: Tensor,
    /// Global stats of the dataset the model was trained on; everything the
    /// model touches lives in this normalized space.
    pub norm: NormStats,
    pub length_range: (usize, usize),
}

impl AeModel {
    pub fn init(
        hidden_size: usize,
        latent_size: usize,
        norm: NormStats,
        length_range: (usize, usize),
        rng: &mut Prng,
    ) -> Self {
        let mut stream = rng.derive("ae-init");
        AeModel {
            hidden_size,
            latent_size,
            encoder: vec![
                LstmParams::new(FEATURES, hidden_size, &mut stream),
                LstmParams::new(hidden_size, hidden_size, &mut stream),
            ],
            latent_w: Tensor::uniform_init(
                &[2 * hidden_size, latent_size],
                2 * hidden_size,
                &mut stream,
            ),
            latent_b: Tensor::zeros(&[1, latent_size]),
            bridge_w: Tensor::uniform_init(
                &[latent_size, 4 * hidden_size],
                latent_size,
                &mut stream,
            ),
            bridge_b: Tensor::zeros(&[1, 4 * hidden_size]),
            decoder: vec![
                LstmParams::new(FEATURES, hidden_size, &mut stream),
                LstmParams::new(hidden_size, hidden_size, &mut stream),
            ],
            out_w: Tensor::uniform_init(&[hidden_size, FEATURES], hidden_size, &mut stream),
            out_b: Tensor::zeros(&[1, FEATURES]),
            norm,
            length_range,
        }
    }

    pub fn tensors(&self) -> Vec<&Tensor> {
        let mut v = Vec::new();
        for layer in &self.encoder {
            v.extend(layer.tensors());
        }
        v.extend([&self.latent_w, &self.latent_b, &self.bridge_w, &self.bridge_b]);
        for layer in &self.decoder {
            v.extend(layer.tensors());
        }
        v.extend([&self.out_w, &self.out_b]);
        v
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut v: Vec<&mut Tensor> = Vec::new();
        for layer in &mut self.encoder {
            v.extend(layer.tensors_mut());
        }
        v.push(&mut self.latent_w);
        v.push(&mut self.latent_b);
        v.push(&mut self.bridge_w);
        v.push(&mut self.bridge_b);
        for layer in &mut self.decoder {
            v.extend(layer.tensors_mut());
        }
        v.push(&mut self.out_w);
        v.push(&mut self.out_b);
        v
    }

    pub fn names(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (i, layer) in self.encoder.iter().enumerate() {
            v.extend(layer.names(&format!("ae.enc{i}.")));
        }
        v.extend(
            ["ae.latent.w", "ae.latent.b", "ae.bridge.w", "ae.bridge.b"]
                .map(str::to_string),
        );
        for (i, layer) in self.decoder.iter().enumerate() {
            v.extend(layer.names(&format!("ae.dec{i}.")));
        }
        v.extend(["ae.out.w", "ae.out.b"].map(str::to_string));
        v
    }

    pub fn bind(&self, tape: &mut Tape) -> Result<BoundAe> {
        Ok(BoundAe {
            enc: self
                .encoder
                .iter()
                .map(|l| l.bind(tape))
                .collect::<neural_core::Result<_>>()?,
            latent_w: tape.leaf(self.latent_w.clone())?,
            latent_b: tape.leaf(self.latent_b.clone())?,
            bridge_w: tape.leaf(self.bridge_w.clone())?,
            bridge_b: tape.leaf(self.bridge_b.clone())?,
            dec: self
                .decoder
                .iter()
                .map(|l| l.bind(tape))
                .collect::<neural_core::Result<_>>()?,
            out_w: tape.leaf(self.out_w.clone())?,
            out_b: tape.leaf(self.out_b.clone())?,
            hidden_size: self.hidden_size,
        })
    }

    /// Fixed-size latent for one normalized trajectory.
    pub fn encode(&self, t: &Trajectory) -> Result<LatentVector> {
        let rows: Vec<Vec<(f64, f64)>> = vec![t.points.clone()];
        Ok(self.encode_rows(&rows)?.pop().unwrap())
    }

    /// Batched encode of same-length normalized point sequences.
    pub fn encode_rows(&self, rows: &[Vec<(f64, f64)>]) -> Result<Vec<LatentVector>> {
        assert!(!rows.is_empty());
        let time = rows[0].len();
        debug_assert!(rows.iter().all(|r| r.len() == time));
        let batch = rows.len();
        let mut tape = Tape::new();
        let bound = self.bind(&mut tape)?;
        let steps = leaf_steps(&mut tape, rows, time)?;
        let latent = bound.encode_steps(&mut tape, &steps)?;
        let value = tape.value(latent);
        Ok((0..batch).map(|i| value.row(i).to_vec()).collect())
    }

    /// Autoregressive rollout of exactly `length` normalized points.
    pub fn decode(&self, z: &[f64], length: usize) -> Result<Vec<(f64, f64)>> {
        if z.len() != self.latent_size {
            return Err(AeError::LatentSizeMismatch {
                model: self.latent_size,
                input: z.len(),
            });
        }
        let (lo, hi) = self.length_range;
        if !(lo..=hi).contains(&length) {
            return Err(AeError::LengthOutOfRange { len: length, lo, hi });
        }
        let mut rows = self.decode_rows(&[z.to_vec()], length)?;
        Ok(rows.pop().unwrap())
    }

    /// Batched rollout for same-length outputs.
    pub fn decode_rows(
        &self,
        latents: &[LatentVector],
        length: usize,
    ) -> Result<Vec<Vec<(f64, f64)>>> {
        assert!(!latents.is_empty());
        let batch = latents.len();
        let mut tape = Tape::new();
        let bound = self.bind(&mut tape)?;
        let data: Vec<f64> = latents.iter().flatten().copied().collect();
        let z = tape.leaf(Tensor::from_vec(&[batch, self.latent_size], data)?)?;
        let outputs = bound.decode_steps(&mut tape, z, batch, length)?;
        let mut rows = vec![Vec::with_capacity(length); batch];
        for out in outputs {
            let v = tape.value(out);
            for (i, row) in rows.iter_mut().enumerate() {
                let p = v.row(i);
                row.push((p[0], p[1]));
            }
        }
        Ok(rows)
    }

    /// Per-element mean squared error between a normalized trajectory and its
    /// reconstruction at the same length.
    pub fn reconstruction_loss(&self, t: &Trajectory) -> Result<f64> {
        let z = self.encode(t)?;
        let recon = self.decode_rows(&[z], t.len())?;
        Ok(mse(&t.points, &recon[0]))
    }

    /// Canonical checkpoint carrying weights and intrinsic metadata only.
    pub fn to_checkpoint(&self) -> ModelCheckpoint {
        let mut ckpt = ModelCheckpoint::new();
        for (name, tensor) in self.names().iter().zip(self.tensors()) {
            ckpt.insert_tensor(name, tensor);
        }
        ckpt.set_meta("ae.hidden_size", self.hidden_size);
        ckpt.set_meta("ae.latent_size", self.latent_size);
        ckpt.set_meta("norm.mean_lat", self.norm.mean_lat);
        ckpt.set_meta("norm.mean_lon", self.norm.mean_lon);
        ckpt.set_meta("norm.std_lat", self.norm.std_lat);
        ckpt.set_meta("norm.std_lon", self.norm.std_lon);
        ckpt.set_meta("len.min", self.length_range.0);
        ckpt.set_meta("len.max", self.length_range.1);
        ckpt
    }

    pub fn from_checkpoint(ckpt: &ModelCheckpoint) -> Result<Self> {
        let hidden_size: usize = ckpt.meta_parsed("ae.hidden_size")?;
        let latent_size: usize = ckpt.meta_parsed("ae.latent_size")?;
        let norm = NormStats {
            mean_lat: ckpt.meta_parsed("norm.mean_lat")?,
            mean_lon: ckpt.meta_parsed("norm.mean_lon")?,
            std_lat: ckpt.meta_parsed("norm.std_lat")?,
            std_lon: ckpt.meta_parsed("norm.std_lon")?,
        };
        let length_range = (ckpt.meta_parsed("len.min")?, ckpt.meta_parsed("len.max")?);
        let mut model = AeModel::init(hidden_size, latent_size, norm, length_range, &mut Prng::new(0));
        for (name, tensor) in model.names().iter().zip(model.tensors_mut()) {
            *tensor = ckpt.tensor(name)?;
        }
        Ok(model)
    }

    /// Content fingerprint of the canonical checkpoint; downstream models
    /// store it to detect latent-space mismatches.
    pub fn fingerprint(&self) -> u64 {
        self.to_checkpoint().content_hash()
    }
}

pub struct BoundAe {
    pub enc: Vec<BoundLstm>,
    pub latent_w: NodeId,
    pub latent_b: NodeId,
    pub bridge_w: NodeId,
    pub bridge_b: NodeId,
    pub dec: Vec<BoundLstm>,
    pub out_w: NodeId,
    pub out_b: NodeId,
    hidden_size: usize,
}

impl BoundAe {
    pub fn param_ids(&self) -> Vec<NodeId> {
        let mut v = Vec::new();
        for layer in &self.enc {
            v.extend(layer.param_ids());
        }
        v.extend([self.latent_w, self.latent_b, self.bridge_w, self.bridge_b]);
        for layer in &self.dec {
            v.extend(layer.param_ids());
        }
        v.extend([self.out_w, self.out_b]);
        v
    }

    /// Encoder stack -> latent projection of the final top-layer (h, c).
    pub fn encode_steps(&self, tape: &mut Tape, steps: &[NodeId]) -> Result<NodeId> {
        let layers: Vec<&BoundLstm> = self.enc.iter().collect();
        let traces = lstm_stack_forward(tape, &layers, steps, None)?;
        let top = traces.last().unwrap();
        let state = tape.concat_cols(top.h_t, top.c_t)?;
        Ok(linear(tape, state, self.latent_w, self.latent_b)?)
    }

    /// Latent -> bridge -> autoregressive decoder rollout of `length` points.
    /// The first step consumes a zero vector; later steps feed back the
    /// previous emission.
    pub fn decode_steps(
        &self,
        tape: &mut Tape,
        latent: NodeId,
        batch: usize,
        length: usize,
    ) -> Result<Vec<NodeId>> {
        let hs = self.hidden_size;
        let bridge = linear(tape, latent, self.bridge_w, self.bridge_b)?;
        let bridge = tape.tanh(bridge)?;
        let h1 = tape.slice_cols(bridge, 0, hs)?;
        let c1 = tape.slice_cols(bridge, hs, 2 * hs)?;
        let h2 = tape.slice_cols(bridge, 2 * hs, 3 * hs)?;
        let c2 = tape.slice_cols(bridge, 3 * hs, 4 * hs)?;
        let mut states = vec![(h1, c1), (h2, c2)];
        let mut x = tape.leaf(Tensor::zeros(&[batch, FEATURES]))?;
        let mut outputs = Vec::with_capacity(length);
        for _ in 0..length {
            let mut input = x;
            for (layer, state) in self.dec.iter().zip(states.iter_mut()) {
                let (h, c) = layer.step(tape, input, state.0, state.1)?;
                *state = (h, c);
                input = h;
            }
            let y = linear(tape, input, self.out_w, self.out_b)?;
            outputs.push(y);
            x = y;
        }
        Ok(outputs)
    }

    /// Full reconstruction pass returning (latent, per-step emissions).
    pub fn forward(
        &self,
        tape: &mut Tape,
        steps: &[NodeId],
        batch: usize,
    ) -> Result<(NodeId, Vec<NodeId>)> {
        let latent = self.encode_steps(tape, steps)?;
        let outputs = self.decode_steps(tape, latent, batch, steps.len())?;
        Ok((latent, outputs))
    }
}

/// Builds one [batch, 2] leaf per frame from same-length point rows.
pub fn leaf_steps(
    tape: &mut Tape,
    rows: &[Vec<(f64, f64)>],
    time: usize,
) -> Result<Vec<NodeId>> {
    let batch = rows.len();
    let mut steps = Vec::with_capacity(time);
    for t in 0..time {
        let mut data = Vec::with_capacity(batch * FEATURES);
        for row in rows {
            data.push(row[t].0);
            data.push(row[t].1);
        }
        steps.push(tape.leaf(Tensor::from_vec(&[batch, FEATURES], data)?)?);
    }
    Ok(steps)
}

pub fn mse(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = (a.len() * FEATURES) as f64;
    a.iter()
        .zip(b)
        .map(|(p, q)| (p.0 - q.0).powi(2) + (p.1 - q.1).powi(2))
        .sum::<f64>()
        / n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_model(seed: u64) -> AeModel {
        AeModel::init(8, 4, NormStats::identity(), (3, 40), &mut Prng::new(seed))
    }

    fn traj(n: usize, seed: u64) -> Trajectory {
        let mut rng = Prng::new(seed);
        Trajectory::new(
            format!("t{seed}"),
            (0..n).map(|_| (rng.range(-1.0, 1.0), rng.range(-1.0, 1.0))).collect(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn latent_dimension_constant_across_lengths() {
        let m = tiny_model(1);
        let a = m.encode(&traj(5, 2)).unwrap();
        let b = m.encode(&traj(31, 3)).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(b.len(), 4);
    }

    #[test]
    fn encode_is_deterministic() {
        let m = tiny_model(2);
        let t = traj(12, 9);
        let a = m.encode(&t).unwrap();
        let b = m.encode(&t).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn decode_emits_exactly_requested_length() {
        let m = tiny_model(3);
        let z = vec![0.1, -0.2, 0.3, 0.0];
        for len in [3, 10, 40] {
            assert_eq!(m.decode(&z, len).unwrap().len(), len);
        }
    }

    #[test]
    fn decode_same_latent_identical_output() {
        let m = tiny_model(4);
        let z = vec![0.5, 0.5, -0.5, 0.25];
        assert_eq!(m.decode(&z, 17).unwrap(), m.decode(&z, 17).unwrap());
    }

    #[test]
    fn decode_rejects_out_of_range_length() {
        let m = tiny_model(5);
        let z = vec![0.0; 4];
        assert!(matches!(
            m.decode(&z, 50),
            Err(AeError::LengthOutOfRange { .. })
        ));
        assert!(matches!(
            m.decode(&[0.0; 3], 10),
            Err(AeError::LatentSizeMismatch { .. })
        ));
    }

    #[test]
    fn reconstruction_loss_nonnegative_and_zero_on_perfect_match() {
        let m = tiny_model(6);
        let t = traj(9, 10);
        let loss = m.reconstruction_loss(&t).unwrap();
        assert!(loss >= 0.0);
        // mse algebra: identical inputs give exactly zero, doubling the
        // residuals quadruples the loss.
        let a = vec![(0.0, 0.0), (1.0, 1.0)];
        assert_eq!(mse(&a, &a), 0.0);
        let b = vec![(0.5, 0.0), (1.0, 1.5)];
        let b2 = vec![(1.0, 0.0), (1.0, 2.0)];
        assert!((mse(&a, &b2) - 4.0 * mse(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn checkpoint_roundtrip_preserves_behavior() {
        let m = tiny_model(7);
        let ckpt = m.to_checkpoint();
        let back = AeModel::from_checkpoint(&ckpt).unwrap();
        assert_eq!(back.fingerprint(), {
            // Fingerprint of the reloaded model matches the saved canonical
            // form (weights pass through f32 in both paths).
            AeModel::from_checkpoint(&m.to_checkpoint())
                .unwrap()
                .fingerprint()
        });
        let t = traj(8, 11);
        let a = back.encode(&t).unwrap();
        let b = AeModel::from_checkpoint(&ckpt).unwrap().encode(&t).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn batched_encode_matches_single() {
        let m = tiny_model(8);
        let rows: Vec<Vec<(f64, f64)>> = (0..4)
            .map(|s| traj(7, 100 + s).points)
            .collect();
        let batched = m.encode_rows(&rows).unwrap();
        for (i, row) in rows.iter().enumerate() {
            let single = m
                .encode(&Trajectory::new("x", row.clone(), None).unwrap())
                .unwrap();
            for (a, b) in batched[i].iter().zip(&single) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
