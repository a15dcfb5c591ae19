//! `trajlab outliers`: reconstruction-loss screening; writes the sorted
//! probability table and plots the top-k trajectories.

use crate::config::RunConfig;
use crate::errors::{require_artifact, Result};
use crate::svg::{ranges, Frame, PALETTE};
use latent_analysis::top_outliers;
use neural_core::ModelCheckpoint;
use recurrent_autoencoder::AeModel;
use trajectory_core::{denormalize_points, load_dataset_with, normalize, IngestOptions};

pub fn run(cfg: &RunConfig) -> Result<()> {
    let data_path = cfg.path("data.file");
    require_artifact(&data_path, "trajlab synth (or point data.file at a dataset)")?;
    let ae_path = cfg.path("ae.checkpoint");
    require_artifact(&ae_path, "trajlab train ae")?;
    let ae = AeModel::from_checkpoint(&ModelCheckpoint::load(&ae_path)?)?;

    let raw = load_dataset_with(
        &data_path,
        IngestOptions {
            allow_any_length: cfg.bool("data.allow_any_length")?,
        },
    )?;
    let normalized = normalize(&raw, &ae.norm);
    let k: usize = cfg.parsed("outliers.k")?;
    let top = top_outliers(&normalized, &ae, k)?;

    let mut csv = String::from("id,loss,prob\n");
    for (_, score) in &top {
        csv.push_str(&format!("{},{},{}\n", score.id, score.loss, score.prob));
    }
    std::fs::write(cfg.out_dir.join("outliers.csv"), csv)?;

    // Plot the flagged trajectories in meters.
    let denal: Vec<Vec<(f64, f64)>> = top
        .iter()
        .map(|(t, _)| denormalize_points(&t.points, &ae.norm))
        .collect();
    let (xr, yr) = ranges(denal.iter().flatten().map(|&(lat, lon)| (lon, lat)));
    let mut frame = Frame::new(xr, yr);
    for (i, pts) in denal.iter().enumerate() {
        let line: Vec<(f64, f64)> = pts.iter().map(|&(lat, lon)| (lon, lat)).collect();
        frame.polyline(&line, PALETTE[i % PALETTE.len()]);
    }
    std::fs::write(
        cfg.out_dir.join("outliers.svg"),
        frame.render("longitudinal distance (m)", "lateral distance (m)"),
    )?;
    println!(
        "scored {} trajectories; top outlier {} (prob {:.3})",
        normalized.len(),
        top.first().map(|(_, s)| s.id.as_str()).unwrap_or("-"),
        top.first().map(|(_, s)| s.prob).unwrap_or(0.0)
    );
    Ok(())
}
