//! GAN over autoencoder latents. The generator maps noise to latent vectors;
//! the critic scores latents. Standard mode trains with non-saturating log
//! loss; WGAN-GP mode trains a Wasserstein critic regularized toward unit
//! input-gradient norm at real/fake interpolates, with the input gradient
//! estimated by central finite differences so only first-order
//! backpropagation is ever needed.

use crate::error::{GanError, Result};
use crate::report::{GanIterStats, GanTrainReport, SampleSnapshot};
use neural_core::{
    Activation, AdamState, BoundFeedForward, FeedForward, MlpParams, ModelCheckpoint, NeuralError,
    NodeId, Prng, ResNetParams, Tape, Tensor,
};
use recurrent_autoencoder::{AeModel, LatentDataset, LatentVector, LenModel};
use trajectory_core::{denormalize_points, Dataset, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GanMode {
    Standard,
    WganGp,
}

impl GanMode {
    pub fn tag(self) -> &'static str {
        match self {
            GanMode::Standard => "standard",
            GanMode::WganGp => "wgangp",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "standard" => Some(GanMode::Standard),
            "wgangp" => Some(GanMode::WganGp),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GanArch {
    Mlp,
    ResNet,
}

#[derive(Debug, Clone)]
pub struct LatentGanConfig {
    pub mode: GanMode,
    pub arch: GanArch,
    pub noise_dim: usize,
    pub hidden: Vec<usize>,
    /// Residual blocks when `arch` is ResNet; width taken from `hidden[0]`.
    pub resnet_blocks: usize,
    pub iters: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub n_critic: usize,
    pub lambda_gp: f64,
    pub gp_h: f64,
    pub snapshot_every: usize,
    pub seed: u64,
}

impl Default for LatentGanConfig {
    fn default() -> Self {
        LatentGanConfig {
            mode: GanMode::WganGp,
            arch: GanArch::Mlp,
            noise_dim: 16,
            hidden: vec![128, 128],
            resnet_blocks: 2,
            iters: 2000,
            batch_size: 64,
            lr: 1e-4,
            n_critic: 5,
            lambda_gp: 10.0,
            gp_h: 1e-3,
            snapshot_every: 500,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LatentGanModel {
    pub generator: FeedForward,
    /// Final layer is affine; Standard mode reads probabilities through a
    /// sigmoid, WGAN-GP uses the raw unbounded score.
    pub critic: FeedForward,
    pub mode: GanMode,
    pub lambda_gp: f64,
    pub noise_dim: usize,
    pub latent_size: usize,
    pub ae_fingerprint: u64,
}

impl LatentGanModel {
    pub fn init(latent_size: usize, ae_fingerprint: u64, cfg: &LatentGanConfig, rng: &mut Prng) -> Self {
        let mut g_rng = rng.derive("lgan-generator");
        let mut d_rng = rng.derive("lgan-critic");
        let generator = match cfg.arch {
            GanArch::Mlp => {
                let mut widths = vec![cfg.noise_dim];
                widths.extend(&cfg.hidden);
                widths.push(latent_size);
                FeedForward::Mlp(MlpParams::new(
                    &widths,
                    Activation::Tanh,
                    Activation::Linear,
                    &mut g_rng,
                ))
            }
            GanArch::ResNet => FeedForward::ResNet(ResNetParams::new(
                cfg.noise_dim,
                cfg.hidden[0],
                cfg.resnet_blocks,
                latent_size,
                Activation::Tanh,
                Activation::Linear,
                &mut g_rng,
            )),
        };
        let critic = match cfg.arch {
            GanArch::Mlp => {
                let mut widths = vec![latent_size];
                widths.extend(&cfg.hidden);
                widths.push(1);
                FeedForward::Mlp(MlpParams::new(
                    &widths,
                    Activation::LeakyRelu,
                    Activation::Linear,
                    &mut d_rng,
                ))
            }
            GanArch::ResNet => FeedForward::ResNet(ResNetParams::new(
                latent_size,
                cfg.hidden[0],
                cfg.resnet_blocks,
                1,
                Activation::LeakyRelu,
                Activation::Linear,
                &mut d_rng,
            )),
        };
        LatentGanModel {
            generator,
            critic,
            mode: cfg.mode,
            lambda_gp: cfg.lambda_gp,
            noise_dim: cfg.noise_dim,
            latent_size,
            ae_fingerprint,
        }
    }

    /// Raw critic scores for a batch of latents.
    pub fn critic_scores(&self, latents: &[LatentVector]) -> Result<Vec<f64>> {
        let x = rows_tensor(latents)?;
        let out = neural_core::feed_forward_eval(&self.critic, &x)?;
        Ok(out.data().to_vec())
    }

    /// Discriminator probabilities in (0,1); Standard mode only.
    pub fn discriminator_probabilities(&self, latents: &[LatentVector]) -> Result<Vec<f64>> {
        Ok(self
            .critic_scores(latents)?
            .into_iter()
            .map(|z| 1.0 / (1.0 + (-z).exp()))
            .collect())
    }

    pub fn to_checkpoint(&self) -> ModelCheckpoint {
        let mut ckpt = ModelCheckpoint::new();
        for (name, t) in self
            .generator
            .names("lgan.gen.")
            .iter()
            .zip(self.generator.tensors())
        {
            ckpt.insert_tensor(name, t);
        }
        for (name, t) in self
            .critic
            .names("lgan.critic.")
            .iter()
            .zip(self.critic.tensors())
        {
            ckpt.insert_tensor(name, t);
        }
        ckpt.set_meta("lgan.mode", self.mode.tag());
        ckpt.set_meta("lgan.lambda_gp", self.lambda_gp);
        ckpt.set_meta("lgan.noise_dim", self.noise_dim);
        ckpt.set_meta("lgan.latent_size", self.latent_size);
        ckpt.set_meta("lgan.ae_fingerprint", self.ae_fingerprint);
        ckpt.set_meta("lgan.arch", arch_tag(&self.generator));
        ckpt.set_meta("lgan.gen_widths", widths_tag(&self.generator));
        ckpt.set_meta("lgan.critic_widths", widths_tag(&self.critic));
        ckpt
    }

    pub fn from_checkpoint(ckpt: &ModelCheckpoint) -> Result<Self> {
        let mode = GanMode::from_tag(ckpt.meta("lgan.mode")?)
            .ok_or_else(|| NeuralError::Checkpoint("bad lgan.mode".into()))?;
        let noise_dim: usize = ckpt.meta_parsed("lgan.noise_dim")?;
        let latent_size: usize = ckpt.meta_parsed("lgan.latent_size")?;
        let arch = ckpt.meta("lgan.arch")?;
        let parse_widths = |s: &str| -> Result<Vec<usize>> {
            s.split(',')
                .map(|w| w.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| NeuralError::Checkpoint("bad widths metadata".into()).into())
        };
        let mut rng = Prng::new(0);
        let (mut generator, mut critic) = match arch {
            "mlp" => {
                let gw = parse_widths(ckpt.meta("lgan.gen_widths")?)?;
                let cw = parse_widths(ckpt.meta("lgan.critic_widths")?)?;
                (
                    FeedForward::Mlp(MlpParams::new(
                        &gw,
                        Activation::Tanh,
                        Activation::Linear,
                        &mut rng,
                    )),
                    FeedForward::Mlp(MlpParams::new(
                        &cw,
                        Activation::LeakyRelu,
                        Activation::Linear,
                        &mut rng,
                    )),
                )
            }
            "resnet" => {
                let gw = parse_widths(ckpt.meta("lgan.gen_widths")?)?;
                // gw encodes [input, width, blocks, output]
                (
                    FeedForward::ResNet(ResNetParams::new(
                        gw[0],
                        gw[1],
                        gw[2],
                        gw[3],
                        Activation::Tanh,
                        Activation::Linear,
                        &mut rng,
                    )),
                    {
                        let cw = parse_widths(ckpt.meta("lgan.critic_widths")?)?;
                        FeedForward::ResNet(ResNetParams::new(
                            cw[0],
                            cw[1],
                            cw[2],
                            cw[3],
                            Activation::LeakyRelu,
                            Activation::Linear,
                            &mut rng,
                        ))
                    },
                )
            }
            other => {
                return Err(
                    NeuralError::Checkpoint(format!("unknown lgan.arch {other:?}")).into(),
                )
            }
        };
        for (name, t) in generator
            .names("lgan.gen.")
            .iter()
            .zip(generator.tensors_mut())
        {
            *t = ckpt.tensor(name)?;
        }
        for (name, t) in critic
            .names("lgan.critic.")
            .iter()
            .zip(critic.tensors_mut())
        {
            *t = ckpt.tensor(name)?;
        }
        Ok(LatentGanModel {
            generator,
            critic,
            mode,
            lambda_gp: ckpt.meta_parsed("lgan.lambda_gp")?,
            noise_dim,
            latent_size,
            ae_fingerprint: ckpt.meta_parsed("lgan.ae_fingerprint")?,
        })
    }
}

fn arch_tag(ff: &FeedForward) -> &'static str {
    match ff {
        FeedForward::Mlp(_) => "mlp",
        FeedForward::ResNet(_) => "resnet",
    }
}

fn widths_tag(ff: &FeedForward) -> String {
    match ff {
        FeedForward::Mlp(m) => m
            .widths
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(","),
        FeedForward::ResNet(r) => format!(
            "{},{},{},{}",
            r.input_dim,
            r.width,
            r.blocks.len(),
            r.output_dim
        ),
    }
}

fn rows_tensor(rows: &[LatentVector]) -> Result<Tensor> {
    let dim = rows.first().map_or(0, Vec::len);
    let data: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(Tensor::from_vec(&[rows.len(), dim], data)?)
}

fn noise_tensor(n: usize, dim: usize, rng: &mut Prng) -> Tensor {
    let data: Vec<f64> = (0..n * dim).map(|_| rng.normal()).collect();
    Tensor::from_vec(&[n, dim], data).expect("noise shape consistent")
}

/// WGAN-GP penalty node: for each real/fake pair, interpolate
/// `x_hat = eps*real + (1-eps)*fake`, estimate the critic's input gradient at
/// `x_hat` by central differences with spacing `h`, and average
/// `(||grad||_2 - 1)^2` over the batch. Every probe is an ordinary critic
/// evaluation at a fixed input, so the node backpropagates into critic
/// parameters with first-order machinery only.
pub fn gradient_penalty(
    tape: &mut Tape,
    critic: &BoundFeedForward,
    x_real: &[LatentVector],
    x_fake: &[LatentVector],
    rng: &mut Prng,
    h: f64,
) -> Result<NodeId> {
    if h <= 0.0 {
        return Err(GanError::BadProbeSpacing(h));
    }
    assert_eq!(x_real.len(), x_fake.len(), "paired batches required");
    let batch = x_real.len();
    let dim = x_real[0].len();

    let mut interp = vec![0.0; batch * dim];
    for (i, (r, f)) in x_real.iter().zip(x_fake).enumerate() {
        let eps = rng.uniform();
        for j in 0..dim {
            interp[i * dim + j] = eps * r[j] + (1.0 - eps) * f[j];
        }
    }

    let mut grad_cols: Option<NodeId> = None;
    for j in 0..dim {
        let mut plus = interp.clone();
        let mut minus = interp.clone();
        for i in 0..batch {
            plus[i * dim + j] += h;
            minus[i * dim + j] -= h;
        }
        let plus = tape.leaf(Tensor::from_vec(&[batch, dim], plus)?)?;
        let minus = tape.leaf(Tensor::from_vec(&[batch, dim], minus)?)?;
        let d_plus = critic.forward(tape, plus)?;
        let d_minus = critic.forward(tape, minus)?;
        let diff = tape.sub(d_plus, d_minus)?;
        let g_j = tape.scale(diff, 1.0 / (2.0 * h))?;
        grad_cols = Some(match grad_cols {
            None => g_j,
            Some(prev) => tape.concat_cols(prev, g_j)?,
        });
    }
    let grad = grad_cols.expect("dim > 0");
    let sq = tape.square(grad)?;
    let norm_sq = tape.sum_rows(sq)?;
    // Tiny epsilon keeps sqrt differentiable at exactly zero gradients.
    let norm_sq = tape.add_scalar(norm_sq, 1e-12)?;
    let norm = tape.sqrt(norm_sq)?;
    let centered = tape.add_scalar(norm, -1.0)?;
    let sq2 = tape.square(centered)?;
    Ok(tape.mean(sq2)?)
}

/// Central-difference input gradient of the critic at one point.
pub fn fd_input_gradient(critic: &FeedForward, x: &[f64], h: f64) -> Result<Vec<f64>> {
    if h <= 0.0 {
        return Err(GanError::BadProbeSpacing(h));
    }
    let mut grad = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        let mut plus = x.to_vec();
        plus[j] += h;
        let mut minus = x.to_vec();
        minus[j] -= h;
        let fp = neural_core::feed_forward_eval(critic, &Tensor::from_vec(&[1, x.len()], plus)?)?;
        let fm = neural_core::feed_forward_eval(critic, &Tensor::from_vec(&[1, x.len()], minus)?)?;
        grad.push((fp.data()[0] - fm.data()[0]) / (2.0 * h));
    }
    Ok(grad)
}

/// Exact autodiff input gradient of the critic at one point.
pub fn autodiff_input_gradient(critic: &FeedForward, x: &[f64]) -> Result<Vec<f64>> {
    let mut tape = Tape::new();
    let bound = critic.bind(&mut tape)?;
    let xid = tape.leaf(Tensor::from_vec(&[1, x.len()], x.to_vec())?)?;
    let out = bound.forward(&mut tape, xid)?;
    let grads = tape.backward(out)?;
    Ok(grads.get_or_zeros(xid, &[1, x.len()]).into_data())
}

fn nan_at(iter: usize) -> impl Fn(GanError) -> GanError {
    move |e| match e {
        GanError::Neural(NeuralError::NonFinite { .. })
        | GanError::Neural(NeuralError::NonFiniteGradient { .. }) => GanError::NanAbort { iter },
        other => other,
    }
}

/// Trains a latent-space GAN on an encoded dataset.
pub fn train_latent_gan(
    ld: &LatentDataset,
    cfg: &LatentGanConfig,
) -> Result<(LatentGanModel, GanTrainReport)> {
    if ld.is_empty() {
        return Err(GanError::EmptyLatents);
    }
    let root = Prng::new(cfg.seed);
    let mut model = LatentGanModel::init(
        ld.latent_size(),
        ld.ae_fingerprint,
        cfg,
        &mut root.derive("init"),
    );
    let mut report = GanTrainReport::default();
    if cfg.iters == 0 {
        return Ok((model, report));
    }

    let (g_betas, d_betas) = match cfg.mode {
        GanMode::Standard => ((0.5, 0.999), (0.5, 0.999)),
        GanMode::WganGp => ((0.0, 0.9), (0.0, 0.9)),
    };
    let mut adam_g =
        AdamState::new(&model.generator.tensors(), cfg.lr).with_betas(g_betas.0, g_betas.1);
    let mut adam_d =
        AdamState::new(&model.critic.tensors(), cfg.lr).with_betas(d_betas.0, d_betas.1);

    let mut data_rng = root.derive("data");
    let mut noise_rng = root.derive("noise");
    let mut gp_rng = root.derive("gp");
    let mut snap_rng = root.derive("snapshots");
    let batch = cfg.batch_size.min(ld.len()).max(1);

    for iter in 1..=cfg.iters {
        let on_nan = nan_at(iter);
        let critic_steps = match cfg.mode {
            GanMode::Standard => 1,
            GanMode::WganGp => cfg.n_critic,
        };
        let mut d_loss_last = 0.0;
        let mut gp_last = None;
        for _ in 0..critic_steps {
            let real: Vec<LatentVector> = data_rng
                .sample_indices(ld.len(), batch)
                .into_iter()
                .map(|i| ld.x[i].clone())
                .collect();
            let fake_vals = {
                let noise = noise_tensor(batch, cfg.noise_dim, &mut noise_rng);
                neural_core::feed_forward_eval(&model.generator, &noise).map_err(GanError::from)
            }
            .map_err(&on_nan)?;
            let fake_rows: Vec<LatentVector> =
                (0..batch).map(|i| fake_vals.row(i).to_vec()).collect();

            let mut tape = Tape::new();
            let critic = model.critic.bind(&mut tape)?;
            let real_id = tape.leaf(rows_tensor(&real)?)?;
            let fake_id = tape.leaf(fake_vals.clone())?;
            let d_real = critic.forward(&mut tape, real_id).map_err(GanError::from).map_err(&on_nan)?;
            let d_fake = critic.forward(&mut tape, fake_id).map_err(GanError::from).map_err(&on_nan)?;
            let loss = match cfg.mode {
                GanMode::Standard => {
                    let ones = Tensor::filled(&[batch, 1], 1.0);
                    let zeros = Tensor::zeros(&[batch, 1]);
                    let l_real = tape.bce_logits_mean(d_real, ones)?;
                    let l_fake = tape.bce_logits_mean(d_fake, zeros)?;
                    let sum = tape.add(l_real, l_fake)?;
                    tape.scale(sum, 0.5)?
                }
                GanMode::WganGp => {
                    let m_fake = tape.mean(d_fake)?;
                    let m_real = tape.mean(d_real)?;
                    let w = tape.sub(m_fake, m_real)?;
                    let gp = gradient_penalty(
                        &mut tape, &critic, &real, &fake_rows, &mut gp_rng, cfg.gp_h,
                    )
                    .map_err(&on_nan)?;
                    gp_last = Some(tape.scalar_value(gp));
                    let gp_scaled = tape.scale(gp, cfg.lambda_gp)?;
                    tape.add(w, gp_scaled)?
                }
            };
            d_loss_last = tape.scalar_value(loss);
            let grads = tape.backward(loss).map_err(GanError::from).map_err(&on_nan)?;
            let gvec: Vec<_> = critic
                .param_ids()
                .iter()
                .zip(model.critic.tensors())
                .map(|(id, p)| grads.get_or_zeros(*id, p.shape()))
                .collect();
            adam_d.step(model.critic.tensors_mut(), &gvec)?;
        }

        // Generator step: gradient flows through the frozen critic.
        let mut tape = Tape::new();
        let generator = model.generator.bind(&mut tape)?;
        let critic = model.critic.bind(&mut tape)?;
        let noise = tape.leaf(noise_tensor(batch, cfg.noise_dim, &mut noise_rng))?;
        let fake = generator.forward(&mut tape, noise).map_err(GanError::from).map_err(&on_nan)?;
        let d_fake = critic.forward(&mut tape, fake).map_err(GanError::from).map_err(&on_nan)?;
        let g_loss = match cfg.mode {
            GanMode::Standard => {
                let ones = Tensor::filled(&[batch, 1], 1.0);
                tape.bce_logits_mean(d_fake, ones)?
            }
            GanMode::WganGp => {
                let m = tape.mean(d_fake)?;
                tape.scale(m, -1.0)?
            }
        };
        let g_loss_val = tape.scalar_value(g_loss);
        let grads = tape.backward(g_loss).map_err(GanError::from).map_err(&on_nan)?;
        let gvec: Vec<_> = generator
            .param_ids()
            .iter()
            .zip(model.generator.tensors())
            .map(|(id, p)| grads.get_or_zeros(*id, p.shape()))
            .collect();
        adam_g.step(model.generator.tensors_mut(), &gvec)?;

        report.rows.push(GanIterStats {
            iter,
            d_loss: d_loss_last,
            g_loss: g_loss_val,
            gp: gp_last,
        });
        if cfg.snapshot_every > 0 && iter % cfg.snapshot_every == 0 {
            let sample = sample_latent(&model, 8, &mut snap_rng)?;
            report.snapshots.push(SampleSnapshot {
                iter,
                values: sample,
            });
        }
    }
    Ok((model, report))
}

/// Draws `n` latent vectors from the generator.
pub fn sample_latent(m: &LatentGanModel, n: usize, rng: &mut Prng) -> Result<Vec<LatentVector>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let noise = noise_tensor(n, m.noise_dim, rng);
    let out = neural_core::feed_forward_eval(&m.generator, &noise)?;
    Ok((0..n).map(|i| out.row(i).to_vec()).collect())
}

/// Full generation pipeline: sample latents, estimate lengths, decode, then
/// map back to meters. All three models must share one latent space.
pub fn generate_trajectories(
    m: &LatentGanModel,
    ae: &AeModel,
    lm: &LenModel,
    n: usize,
    rng: &mut Prng,
) -> Result<Dataset> {
    let ae_print = ae.fingerprint();
    if m.latent_size != ae.latent_size {
        return Err(GanError::LatentSpaceMismatch(format!(
            "generator latent size {} vs autoencoder {}",
            m.latent_size, ae.latent_size
        )));
    }
    if m.ae_fingerprint != ae_print {
        return Err(GanError::LatentSpaceMismatch(
            "generator was trained against a different autoencoder checkpoint".into(),
        ));
    }
    if lm.ae_fingerprint != ae_print {
        return Err(GanError::LatentSpaceMismatch(
            "length estimator was trained against a different autoencoder checkpoint".into(),
        ));
    }
    let latents = sample_latent(m, n, rng)?;
    let mut by_len: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    let mut lengths = Vec::with_capacity(n);
    for (i, z) in latents.iter().enumerate() {
        let len = lm.estimate_length(z)?;
        lengths.push(len);
        by_len.entry(len).or_default().push(i);
    }
    let mut points: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n];
    for (&len, members) in &by_len {
        let zs: Vec<LatentVector> = members.iter().map(|&i| latents[i].clone()).collect();
        let decoded = ae.decode_rows(&zs, len)?;
        for (&i, rows) in members.iter().zip(decoded) {
            points[i] = denormalize_points(&rows, &ae.norm);
        }
    }
    let trajectories: Vec<Trajectory> = points
        .into_iter()
        .enumerate()
        .map(|(i, pts)| Trajectory::new(format!("gen_{i:05}"), pts, None))
        .collect::<trajectory_core::Result<_>>()?;
    Ok(Dataset::new(trajectories)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_critic(weights: &[f64]) -> FeedForward {
        let mut rng = Prng::new(0);
        let mut mlp = MlpParams::new(
            &[weights.len(), 1],
            Activation::LeakyRelu,
            Activation::Linear,
            &mut rng,
        );
        mlp.weights[0] = Tensor::from_vec(&[weights.len(), 1], weights.to_vec()).unwrap();
        mlp.biases[0] = Tensor::zeros(&[1, 1]);
        FeedForward::Mlp(mlp)
    }

    fn toy_latents(n: usize, dim: usize, seed: u64) -> LatentDataset {
        let mut rng = Prng::new(seed);
        LatentDataset {
            x: (0..n)
                .map(|_| (0..dim).map(|_| rng.normal()).collect())
                .collect(),
            y: vec![30; n],
            ids: (0..n).map(|i| format!("z{i}")).collect(),
            length_range: (30, 70),
            ae_fingerprint: 1,
        }
    }

    #[test]
    fn unit_norm_linear_critic_has_zero_penalty() {
        // D(x) = w.x with ||w|| = 1: finite differences are exact for linear
        // maps, so the penalty vanishes.
        let w = vec![0.6, 0.8];
        let critic = linear_critic(&w);
        let mut tape = Tape::new();
        let bound = critic.bind(&mut tape).unwrap();
        let real = vec![vec![1.0, 2.0], vec![-0.5, 0.25]];
        let fake = vec![vec![0.0, 0.0], vec![1.0, -1.0]];
        let mut rng = Prng::new(3);
        let gp = gradient_penalty(&mut tape, &bound, &real, &fake, &mut rng, 1e-3).unwrap();
        assert!(tape.scalar_value(gp).abs() < 1e-10);
    }

    #[test]
    fn norm_three_linear_critic_penalty_is_four() {
        let w = vec![3.0_f64.sqrt(); 3]; // ||w|| = 3
        let critic = linear_critic(&w);
        let mut tape = Tape::new();
        let bound = critic.bind(&mut tape).unwrap();
        let mut rng = Prng::new(5);
        let real: Vec<Vec<f64>> = (0..4).map(|_| (0..3).map(|_| rng.normal()).collect()).collect();
        let fake: Vec<Vec<f64>> = (0..4).map(|_| (0..3).map(|_| rng.normal()).collect()).collect();
        let gp = gradient_penalty(&mut tape, &bound, &real, &fake, &mut rng, 1e-3).unwrap();
        assert!((tape.scalar_value(gp) - 4.0).abs() < 1e-8, "{}", tape.scalar_value(gp));
    }

    #[test]
    fn fd_gradient_matches_autodiff_on_random_critic() {
        let mut rng = Prng::new(11);
        let critic = FeedForward::Mlp(MlpParams::new(
            &[4, 8, 1],
            Activation::LeakyRelu,
            Activation::Linear,
            &mut rng,
        ));
        for trial in 0..5 {
            let x: Vec<f64> = (0..4).map(|_| rng.range(-2.0, 2.0)).collect();
            let fd = fd_input_gradient(&critic, &x, 1e-3).unwrap();
            let ad = autodiff_input_gradient(&critic, &x).unwrap();
            for (a, b) in fd.iter().zip(&ad) {
                assert!(
                    neural_core::rel_err(*a, *b) < 1e-6,
                    "trial {trial}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn zero_iterations_returns_initialized_model() {
        let ld = toy_latents(32, 4, 1);
        let cfg = LatentGanConfig {
            iters: 0,
            hidden: vec![16],
            seed: 9,
            ..Default::default()
        };
        let (model, report) = train_latent_gan(&ld, &cfg).unwrap();
        assert!(report.rows.is_empty());
        let fresh = LatentGanModel::init(4, 1, &cfg, &mut Prng::new(9).derive("init"));
        assert_eq!(model.generator.tensors(), fresh.generator.tensors());
        assert_eq!(model.critic.tensors(), fresh.critic.tensors());
    }

    #[test]
    fn training_is_deterministic() {
        let ld = toy_latents(48, 4, 2);
        let cfg = LatentGanConfig {
            iters: 8,
            hidden: vec![16],
            batch_size: 16,
            n_critic: 2,
            seed: 4,
            ..Default::default()
        };
        let (m1, r1) = train_latent_gan(&ld, &cfg).unwrap();
        let (m2, r2) = train_latent_gan(&ld, &cfg).unwrap();
        assert_eq!(r1.rows, r2.rows);
        assert_eq!(m1.generator.tensors(), m2.generator.tensors());
    }

    #[test]
    fn sample_latent_edge_cases() {
        let ld = toy_latents(16, 3, 3);
        let cfg = LatentGanConfig {
            iters: 0,
            hidden: vec![8],
            ..Default::default()
        };
        let (model, _) = train_latent_gan(&ld, &cfg).unwrap();
        assert!(sample_latent(&model, 0, &mut Prng::new(1)).unwrap().is_empty());
        let a = sample_latent(&model, 5, &mut Prng::new(2)).unwrap();
        let b = sample_latent(&model, 5, &mut Prng::new(2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        assert!(a.iter().all(|z| z.len() == 3));
    }

    #[test]
    fn standard_mode_probabilities_in_unit_interval() {
        let ld = toy_latents(32, 4, 5);
        let cfg = LatentGanConfig {
            mode: GanMode::Standard,
            iters: 5,
            hidden: vec![12],
            batch_size: 8,
            seed: 6,
            ..Default::default()
        };
        let (model, report) = train_latent_gan(&ld, &cfg).unwrap();
        assert!(report.all_finite());
        assert!(report.rows.iter().all(|r| r.gp.is_none()));
        let probs = model
            .discriminator_probabilities(&ld.x[..8].to_vec())
            .unwrap();
        assert!(probs.iter().all(|&p| p > 0.0 && p < 1.0));
    }

    #[test]
    fn checkpoint_roundtrip() {
        let ld = toy_latents(16, 4, 6);
        let cfg = LatentGanConfig {
            iters: 2,
            hidden: vec![8],
            batch_size: 8,
            n_critic: 1,
            seed: 7,
            ..Default::default()
        };
        let (model, _) = train_latent_gan(&ld, &cfg).unwrap();
        let back = LatentGanModel::from_checkpoint(&model.to_checkpoint()).unwrap();
        assert_eq!(back.mode, model.mode);
        assert_eq!(back.noise_dim, model.noise_dim);
        assert_eq!(back.latent_size, model.latent_size);
        let a = sample_latent(&back, 3, &mut Prng::new(8)).unwrap();
        let b = sample_latent(
            &LatentGanModel::from_checkpoint(&model.to_checkpoint()).unwrap(),
            3,
            &mut Prng::new(8),
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
