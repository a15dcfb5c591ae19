//! `trajlab train <stage>`: fit one model stage and write its checkpoint
//! plus a loss-history CSV.

use crate::config::RunConfig;
use crate::errors::{require_artifact, CliError, Result};
use generators::{train_latent_gan, train_rcgan, GanArch, GanMode, LatentGanConfig, RcganConfig};
use neural_core::{Activation, ModelCheckpoint};
use recurrent_autoencoder::{
    encode_dataset, train_autoencoder, train_length_estimator, AeModel, AeTrainConfig,
    LenTrainConfig, TrainHistory,
};
use std::path::Path;
use trajectory_core::{fit_normalization, load_dataset_with, normalize, Dataset, IngestOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TrainStage {
    Ae,
    Len,
    Lgan,
    Rcgan,
}

fn load_normalized(cfg: &RunConfig) -> Result<Dataset> {
    let path = cfg.path("data.file");
    require_artifact(&path, "trajlab synth (or point data.file at a dataset)")?;
    let raw = load_dataset_with(
        &path,
        IngestOptions {
            allow_any_length: cfg.bool("data.allow_any_length")?,
        },
    )?;
    let stats = fit_normalization(&raw).map_err(|e| CliError::Other(e.into()))?;
    Ok(normalize(&raw, &stats))
}

fn load_ae(cfg: &RunConfig) -> Result<AeModel> {
    let path = cfg.path("ae.checkpoint");
    require_artifact(&path, "trajlab train ae")?;
    Ok(AeModel::from_checkpoint(&ModelCheckpoint::load(&path)?)?)
}

fn write_history_csv(path: &Path, history: &TrainHistory) -> Result<()> {
    let mut out = String::from("epoch,train_loss,val_loss\n");
    for e in history {
        out.push_str(&format!("{},{},{}\n", e.epoch, e.train_loss, e.val_loss));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn run(cfg: &RunConfig, stage: TrainStage) -> Result<()> {
    match stage {
        TrainStage::Ae => train_ae(cfg),
        TrainStage::Len => train_len(cfg),
        TrainStage::Lgan => train_lgan(cfg),
        TrainStage::Rcgan => train_rcgan_stage(cfg),
    }
}

fn ae_config(cfg: &RunConfig, hidden_size: usize) -> Result<AeTrainConfig> {
    Ok(AeTrainConfig {
        hidden_size,
        latent_size: cfg.parsed("ae.latent_size")?,
        epochs: cfg.parsed("ae.epochs")?,
        lr: cfg.parsed("ae.lr")?,
        batch_size: cfg.parsed("ae.batch_size")?,
        val_fraction: cfg.parsed("ae.val_fraction")?,
        seed: cfg.seed(),
    })
}

fn train_ae(cfg: &RunConfig) -> Result<()> {
    let ds = load_normalized(cfg)?;
    let sweep: Vec<usize> = cfg.list("ae.hidden_sizes")?;
    if sweep.is_empty() {
        let train_cfg = ae_config(cfg, cfg.parsed("ae.hidden_size")?)?;
        let (model, history) = train_autoencoder(&ds, &train_cfg)?;
        let mut ckpt = model.to_checkpoint();
        ckpt.set_meta("train.seed", cfg.seed());
        ckpt.set_meta("train.epochs", train_cfg.epochs);
        if let Some(last) = history.last() {
            ckpt.set_meta("train.final_val_loss", last.val_loss);
        }
        let path = cfg.path("ae.checkpoint");
        ckpt.save(&path)?;
        write_history_csv(&cfg.out_dir.join("ae_history.csv"), &history)?;
        println!(
            "trained autoencoder (hidden {}, latent {}) -> {}",
            train_cfg.hidden_size,
            train_cfg.latent_size,
            path.display()
        );
        return Ok(());
    }

    // Hidden-size sweep: one checkpoint and history per size plus a summary.
    let mut summary = String::from("hidden_size,best_val_loss,final_val_loss,final_train_loss\n");
    for hs in sweep {
        let train_cfg = ae_config(cfg, hs)?;
        let (model, history) = train_autoencoder(&ds, &train_cfg)?;
        let best = history
            .iter()
            .map(|e| e.val_loss)
            .fold(f64::INFINITY, f64::min);
        let last = history.last().expect("non-zero epochs in sweep");
        summary.push_str(&format!(
            "{hs},{best},{},{}\n",
            last.val_loss, last.train_loss
        ));
        let mut ckpt = model.to_checkpoint();
        ckpt.set_meta("train.seed", cfg.seed());
        ckpt.save(&cfg.out_dir.join(format!("ae_hs{hs}.ckpt")))?;
        write_history_csv(&cfg.out_dir.join(format!("ae_hs{hs}_history.csv")), &history)?;
        println!("swept hidden size {hs}: best val loss {best:.6}");
    }
    std::fs::write(cfg.out_dir.join("ae_sweep.csv"), summary)?;
    Ok(())
}

fn train_len(cfg: &RunConfig) -> Result<()> {
    let ds = load_normalized(cfg)?;
    let ae = load_ae(cfg)?;
    let ds = normalize_with_model(&ds, &ae);
    let latents = encode_dataset(&ae, &ds)?;
    let activation = Activation::from_tag(cfg.str("len.activation"))
        .ok_or_else(|| CliError::Config("len.activation must be tanh or leaky_relu".into()))?;
    let train_cfg = LenTrainConfig {
        hidden: cfg.list("len.hidden")?,
        epochs: cfg.parsed("len.epochs")?,
        lr: cfg.parsed("len.lr")?,
        lr_decay: cfg.parsed("len.lr_decay")?,
        batch_size: cfg.parsed("len.batch_size")?,
        val_fraction: cfg.parsed("len.val_fraction")?,
        hidden_activation: activation,
        seed: cfg.seed(),
    };
    let (model, history) = train_length_estimator(&latents, &train_cfg)?;
    let mut ckpt = model.to_checkpoint();
    ckpt.set_meta("train.seed", cfg.seed());
    let path = cfg.path("len.checkpoint");
    ckpt.save(&path)?;
    let mut csv = String::from("epoch,train_mse,val_mse\n");
    for e in &history {
        csv.push_str(&format!("{},{},{}\n", e.epoch, e.train_mse, e.val_mse));
    }
    std::fs::write(cfg.out_dir.join("len_history.csv"), csv)?;
    println!("trained length estimator -> {}", path.display());
    Ok(())
}

/// Re-normalizes a dataset into the model's stored frame. The dataset was
/// normalized with its own stats on load; undo and redo with the model's.
fn normalize_with_model(ds: &Dataset, ae: &AeModel) -> Dataset {
    let own = ds.norm_stats.expect("load_normalized sets stats");
    let raw = trajectory_core::denormalize(ds, &own);
    normalize(&raw, &ae.norm)
}

fn train_lgan(cfg: &RunConfig) -> Result<()> {
    let ds = load_normalized(cfg)?;
    let ae = load_ae(cfg)?;
    let ds = normalize_with_model(&ds, &ae);
    let latents = encode_dataset(&ae, &ds)?;
    let mode = GanMode::from_tag(cfg.str("lgan.mode"))
        .ok_or_else(|| CliError::Config("lgan.mode must be standard or wgangp".into()))?;
    let arch = match cfg.str("lgan.arch") {
        "mlp" => GanArch::Mlp,
        "resnet" => GanArch::ResNet,
        other => {
            return Err(CliError::Config(format!(
                "lgan.arch must be mlp or resnet, got {other:?}"
            )))
        }
    };
    let train_cfg = LatentGanConfig {
        mode,
        arch,
        noise_dim: cfg.parsed("lgan.noise_dim")?,
        hidden: cfg.list("lgan.hidden")?,
        resnet_blocks: cfg.parsed("lgan.resnet_blocks")?,
        iters: cfg.parsed("lgan.iters")?,
        batch_size: cfg.parsed("lgan.batch_size")?,
        lr: cfg.parsed("lgan.lr")?,
        n_critic: cfg.parsed("lgan.n_critic")?,
        lambda_gp: cfg.parsed("lgan.lambda_gp")?,
        gp_h: cfg.parsed("lgan.gp_h")?,
        snapshot_every: cfg.parsed("lgan.snapshot_every")?,
        seed: cfg.seed(),
    };
    let (model, report) = train_latent_gan(&latents, &train_cfg)?;
    let mut ckpt = model.to_checkpoint();
    ckpt.set_meta("train.seed", cfg.seed());
    let path = cfg.path("lgan.checkpoint");
    ckpt.save(&path)?;
    std::fs::write(cfg.out_dir.join("lgan_report.csv"), report.to_csv())?;
    println!(
        "trained latent GAN ({}) over {} iterations -> {}",
        mode.tag(),
        train_cfg.iters,
        path.display()
    );
    Ok(())
}

fn train_rcgan_stage(cfg: &RunConfig) -> Result<()> {
    let ds = load_normalized(cfg)?;
    let train_cfg = RcganConfig {
        hidden_size: cfg.parsed("rcgan.hidden_size")?,
        gen_layers: cfg.parsed("rcgan.gen_layers")?,
        noise_dim: cfg.parsed("rcgan.noise_dim")?,
        iters: cfg.parsed("rcgan.iters")?,
        batch_size: cfg.parsed("rcgan.batch_size")?,
        d_lr: cfg.parsed("rcgan.d_lr")?,
        g_lr: cfg.parsed("rcgan.g_lr")?,
        snapshot_every: cfg.parsed("rcgan.snapshot_every")?,
        seed: cfg.seed(),
    };
    let (model, report) = train_rcgan(&ds, &train_cfg)?;
    let mut ckpt = model.to_checkpoint();
    ckpt.set_meta("train.seed", cfg.seed());
    let path = cfg.path("rcgan.checkpoint");
    ckpt.save(&path)?;
    std::fs::write(cfg.out_dir.join("rcgan_report.csv"), report.to_csv())?;
    println!(
        "trained RC-GAN over {} iterations -> {}",
        train_cfg.iters,
        path.display()
    );
    Ok(())
}
