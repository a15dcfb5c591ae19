//! `trajlab cluster`: encode a labeled dataset, reduce dimensionality,
//! cluster with DBSCAN (fixed parameters or a sweep), and score agreement
//! with the rule labels.

use crate::config::RunConfig;
use crate::errors::{require_artifact, CliError, Result};
use crate::svg::{ranges, Frame, NOISE_COLOR, PALETTE};
use latent_analysis::{
    balance_by_label, cluster_consistency, dbscan, pca_fit_transform, svd_transform, tsne_embed,
    ClusterLabels, ConsistencyReport, Embedding, TsneConfig, NOISE,
};
use neural_core::{ModelCheckpoint, Prng};
use recurrent_autoencoder::{encode_dataset, AeModel};
use trajectory_core::{
    load_dataset_with, normalize, IngestOptions, ScenarioLabel,
};

pub fn run(cfg: &RunConfig) -> Result<()> {
    let data_path = cfg.path("data.file");
    require_artifact(&data_path, "trajlab synth (or point data.file at a labeled dataset)")?;
    let ae_path = cfg.path("ae.checkpoint");
    require_artifact(&ae_path, "trajlab train ae")?;
    let ae = AeModel::from_checkpoint(&ModelCheckpoint::load(&ae_path)?)?;

    let raw = load_dataset_with(
        &data_path,
        IngestOptions {
            allow_any_length: cfg.bool("data.allow_any_length")?,
        },
    )?;
    let mut rng = Prng::new(cfg.seed()).derive("cluster");
    let mut working = if cfg.bool("cluster.balance")? {
        balance_by_label(&raw, &mut rng)?
    } else {
        raw
    };
    let cap: usize = cfg.parsed("cluster.max_points")?;
    if working.len() > cap {
        let keep = rng.sample_indices(working.len(), cap);
        let mut sorted = keep;
        sorted.sort_unstable();
        working = working.subset(&sorted);
    }
    let normalized = normalize(&working, &ae.norm);
    let latents = encode_dataset(&ae, &normalized)?;
    let truth: Vec<ScenarioLabel> = working
        .iter()
        .map(|t| t.label.unwrap_or(ScenarioLabel::Unknown))
        .collect();

    let method = cfg.str("cluster.method").to_string();
    let embedding: Embedding = match method.as_str() {
        "pca" => pca_fit_transform(&latents.x, cfg.parsed("cluster.k")?)?.0,
        "svd" => svd_transform(&latents.x, cfg.parsed("cluster.k")?)?.0,
        "tsne" => {
            let tsne_cfg = TsneConfig {
                perplexity: cfg.parsed("tsne.perplexity")?,
                iters: cfg.parsed("tsne.iters")?,
                lr: cfg.parsed("tsne.lr")?,
                early_exaggeration: cfg.parsed("tsne.early_exaggeration")?,
                exaggeration_iters: cfg.parsed("tsne.exaggeration_iters")?,
                seed: cfg.seed(),
            };
            tsne_embed(&latents.x, &tsne_cfg)?.0
        }
        other => {
            return Err(CliError::Config(format!(
                "cluster.method must be pca, svd or tsne, got {other:?}"
            )))
        }
    };

    let (labels, report, sweep_csv) = if cfg.bool("cluster.sweep")? {
        sweep(&embedding, &truth)?
    } else {
        let labels = dbscan(
            &embedding,
            cfg.parsed("cluster.eps")?,
            cfg.parsed("cluster.min_neighbors")?,
        )?;
        let report = cluster_consistency(&labels, &truth)?;
        (labels, report, None)
    };

    if let Some(csv) = sweep_csv {
        std::fs::write(cfg.out_dir.join("cluster_sweep.csv"), csv)?;
    }
    write_embedding_csv(cfg, &latents.ids, &embedding, &labels, &truth)?;
    write_consistency(cfg, &labels, &report)?;
    write_scatter_svg(cfg, &embedding, &labels)?;
    println!(
        "{}: {} clusters, {} noise, purity {:.3}, refinement {}",
        method,
        labels.cluster_count(),
        labels.noise_count(),
        report.purity,
        report.refinement
    );
    Ok(())
}

/// Grid over radius quantiles and density thresholds; prefers refinement,
/// then purity, then fewer noise points. Deterministic tie-breaks by grid
/// order.
fn sweep(
    embedding: &Embedding,
    truth: &[ScenarioLabel],
) -> Result<(ClusterLabels, ConsistencyReport, Option<String>)> {
    let n = embedding.coords.len();
    let mut dists: Vec<f64> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d: f64 = embedding.coords[i]
                .iter()
                .zip(&embedding.coords[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            dists.push(d.sqrt());
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let quantile = |q: f64| dists[((dists.len() - 1) as f64 * q) as usize];
    let eps_grid: Vec<f64> = [0.01, 0.02, 0.05, 0.08, 0.12, 0.2]
        .iter()
        .map(|&q| quantile(q).max(1e-9))
        .collect();
    let min_grid = [4usize, 8, 12, 20, 25];

    let mut csv = String::from("eps,min_neighbors,clusters,noise,purity,refinement\n");
    let mut best: Option<(ClusterLabels, ConsistencyReport)> = None;
    for &eps in &eps_grid {
        for &min_neighbors in &min_grid {
            let labels = dbscan(embedding, eps, min_neighbors)?;
            let report = cluster_consistency(&labels, truth)?;
            csv.push_str(&format!(
                "{eps},{min_neighbors},{},{},{},{}\n",
                labels.cluster_count(),
                labels.noise_count(),
                report.purity,
                report.refinement
            ));
            let better = match &best {
                None => true,
                Some((prev_labels, prev_report)) => {
                    let key = (
                        report.refinement && labels.cluster_count() > 0,
                        report.purity,
                        usize::MAX - labels.noise_count(),
                    );
                    let prev_key = (
                        prev_report.refinement && prev_labels.cluster_count() > 0,
                        prev_report.purity,
                        usize::MAX - prev_labels.noise_count(),
                    );
                    key > prev_key
                }
            };
            if better {
                best = Some((labels, report));
            }
        }
    }
    let (labels, report) = best.expect("non-empty grid");
    Ok((labels, report, Some(csv)))
}

fn write_embedding_csv(
    cfg: &RunConfig,
    ids: &[String],
    embedding: &Embedding,
    labels: &ClusterLabels,
    truth: &[ScenarioLabel],
) -> Result<()> {
    let mut csv = String::from("id,x,y,cluster,truth_label\n");
    for (((id, coords), &cluster), label) in ids
        .iter()
        .zip(&embedding.coords)
        .zip(&labels.labels)
        .zip(truth)
    {
        let y = coords.get(1).copied().unwrap_or(0.0);
        csv.push_str(&format!(
            "{id},{},{y},{cluster},{}\n",
            coords[0],
            label.tag()
        ));
    }
    std::fs::write(cfg.out_dir.join("embedding.csv"), csv)?;
    Ok(())
}

fn write_consistency(cfg: &RunConfig, labels: &ClusterLabels, report: &ConsistencyReport) -> Result<()> {
    let mut text = format!(
        "clusters={} noise={} purity={:.4} refinement={}\n",
        labels.cluster_count(),
        labels.noise_count(),
        report.purity,
        report.refinement
    );
    text.push_str("cluster,truth_label,count\n");
    for ((cluster, label), count) in &report.contingency {
        text.push_str(&format!("{cluster},{label},{count}\n"));
    }
    std::fs::write(cfg.out_dir.join("consistency.txt"), text)?;
    Ok(())
}

fn write_scatter_svg(cfg: &RunConfig, embedding: &Embedding, labels: &ClusterLabels) -> Result<()> {
    let pts: Vec<(f64, f64)> = embedding
        .coords
        .iter()
        .map(|c| (c[0], c.get(1).copied().unwrap_or(0.0)))
        .collect();
    let (xr, yr) = ranges(pts.iter().copied());
    let mut frame = Frame::new(xr, yr);
    for (p, &label) in pts.iter().zip(&labels.labels) {
        let color = if label == NOISE {
            NOISE_COLOR
        } else {
            PALETTE[label as usize % PALETTE.len()]
        };
        frame.circle(p.0, p.1, color);
    }
    std::fs::write(
        cfg.out_dir.join("embedding.svg"),
        frame.render("component 1", "component 2"),
    )?;
    Ok(())
}
