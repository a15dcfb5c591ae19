//! `trajlab sample`: draw trajectories from a trained generator, either the
//! latent path (GAN -> length estimate -> decode) or the RC-GAN path with
//! per-length counts.

use crate::config::RunConfig;
use crate::errors::{require_artifact, CliError, Result};
use generators::{generate_trajectories, sample_rcgan, LatentGanModel, RcganModel};
use neural_core::{ModelCheckpoint, Prng};
use recurrent_autoencoder::{AeModel, LenModel};
use trajectory_core::{save_dataset, Dataset};

pub fn run(cfg: &RunConfig) -> Result<()> {
    let out = cfg.path("sample.out_file");
    let seed = cfg.seed();
    let mut provenance = vec![format!("seed={seed}")];
    let dataset = match cfg.str("sample.path") {
        "latent" => {
            let ae_path = cfg.path("ae.checkpoint");
            require_artifact(&ae_path, "trajlab train ae")?;
            let len_path = cfg.path("len.checkpoint");
            require_artifact(&len_path, "trajlab train len")?;
            let lgan_path = cfg.path("lgan.checkpoint");
            require_artifact(&lgan_path, "trajlab train lgan")?;
            let ae_ckpt = ModelCheckpoint::load(&ae_path)?;
            let ae = AeModel::from_checkpoint(&ae_ckpt)?;
            let lm = LenModel::from_checkpoint(&ModelCheckpoint::load(&len_path)?)?;
            let gan = LatentGanModel::from_checkpoint(&ModelCheckpoint::load(&lgan_path)?)?;
            let n: usize = cfg.parsed("sample.n")?;
            provenance.push(format!("path=latent n={n}"));
            provenance.push(format!("ae_fingerprint={:016x}", ae.fingerprint()));
            let mut rng = Prng::new(seed).derive("sample-latent");
            generate_trajectories(&gan, &ae, &lm, n, &mut rng)?
        }
        "rcgan" => {
            let rc_path = cfg.path("rcgan.checkpoint");
            require_artifact(&rc_path, "trajlab train rcgan")?;
            let model = RcganModel::from_checkpoint(&ModelCheckpoint::load(&rc_path)?)?;
            let pairs = parse_lengths(cfg.str("sample.lengths"))?;
            provenance.push(format!("path=rcgan lengths={}", cfg.str("sample.lengths")));
            let mut trajectories = Vec::new();
            for (length, count) in pairs {
                let mut rng = Prng::new(seed).derive(&format!("sample-rcgan-{length}"));
                let ds = sample_rcgan(&model, length, count, &mut rng)?;
                trajectories.extend(ds.trajectories);
            }
            Dataset::new(trajectories)?
        }
        other => {
            return Err(CliError::Config(format!(
                "sample.path must be latent or rcgan, got {other:?}"
            )))
        }
    };
    save_dataset(&dataset, &out)?;
    let mut sidecar = provenance.join("\n");
    sidecar.push('\n');
    std::fs::write(out.with_extension("jsonl.provenance"), sidecar)?;
    println!("sampled {} trajectories to {}", dataset.len(), out.display());
    Ok(())
}

/// Parses "30:50,70:50" into (length, count) pairs.
fn parse_lengths(raw: &str) -> Result<Vec<(usize, usize)>> {
    raw.split(',')
        .map(|pair| {
            let (l, c) = pair
                .trim()
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("sample.lengths: bad pair {pair:?}")))?;
            Ok((
                l.parse()
                    .map_err(|_| CliError::Config(format!("bad length {l:?}")))?,
                c.parse()
                    .map_err(|_| CliError::Config(format!("bad count {c:?}")))?,
            ))
        })
        .collect()
}
