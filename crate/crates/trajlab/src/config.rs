//! Flat key=value run configuration. Every key has a registered default;
//! unknown keys are rejected; the fully resolved map is written next to the
//! outputs of every command so runs are reproducible from their artifacts.

use crate::errors::{CliError, Result};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// (key, default, help) registry. A single source of truth for validation,
/// resolution, and the config reference printed by `--help-config`.
pub const SCHEMA: &[(&str, &str, &str)] = &[
    ("seed", "42", "root seed for every stochastic stage"),
    ("data.file", "dataset.jsonl", "input dataset (JSONL)"),
    ("data.allow_any_length", "false", "accept trajectories outside 30..70 frames"),
    ("synth.count_cutin", "0", "cut-ins to synthesize"),
    ("synth.count_driveby_left", "0", "left drive-bys to synthesize"),
    ("synth.count_driveby_right", "0", "right drive-bys to synthesize"),
    ("synth.count_unknown", "0", "aborted cut-ins to synthesize"),
    ("synth.lane_offset_m", "3.5", "adjacent-lane offset in meters"),
    ("synth.lon_min_m", "10", "longitudinal range start"),
    ("synth.lon_max_m", "120", "longitudinal range end"),
    ("synth.accel_min", "-1.5", "acceleration range start (m/s^2)"),
    ("synth.accel_max", "1.5", "acceleration range end (m/s^2)"),
    ("synth.noise_std_m", "0.15", "i.i.d. Gaussian noise per point"),
    ("synth.len_min", "30", "minimum frames"),
    ("synth.len_max", "70", "maximum frames"),
    ("synth.decel_fraction", "0.15", "probability of a decelerating trend"),
    ("synth.out_file", "dataset.jsonl", "output dataset name"),
    ("ae.hidden_size", "64", "LSTM hidden units per layer"),
    ("ae.latent_size", "32", "latent vector size"),
    ("ae.epochs", "80", "training epochs"),
    ("ae.lr", "0.001", "Adam learning rate"),
    ("ae.batch_size", "64", "max sequences per same-length batch"),
    ("ae.val_fraction", "0.2", "held-out fraction"),
    ("ae.checkpoint", "ae.ckpt", "autoencoder checkpoint name"),
    ("ae.hidden_sizes", "", "comma list for a hidden-size sweep (empty = off)"),
    ("len.hidden", "192,192", "regressor hidden widths"),
    ("len.epochs", "800", "training epochs"),
    ("len.lr", "0.003", "Adam learning rate"),
    ("len.lr_decay", "0.998", "per-epoch learning-rate decay"),
    ("len.batch_size", "64", "minibatch size"),
    ("len.val_fraction", "0.2", "held-out fraction"),
    ("len.activation", "leaky_relu", "hidden activation (tanh|leaky_relu)"),
    ("len.checkpoint", "len.ckpt", "length-estimator checkpoint name"),
    ("lgan.mode", "wgangp", "standard | wgangp"),
    ("lgan.arch", "mlp", "mlp | resnet"),
    ("lgan.noise_dim", "16", "generator noise dimension"),
    ("lgan.hidden", "128,128", "hidden widths (mlp) or width,blocks source (resnet)"),
    ("lgan.resnet_blocks", "2", "residual blocks when arch = resnet"),
    ("lgan.iters", "2000", "generator iterations"),
    ("lgan.batch_size", "64", "batch size"),
    ("lgan.lr", "0.0001", "Adam learning rate (both nets)"),
    ("lgan.n_critic", "5", "critic steps per generator step (wgangp)"),
    ("lgan.lambda_gp", "10", "gradient-penalty weight"),
    ("lgan.gp_h", "0.001", "finite-difference probe spacing"),
    ("lgan.snapshot_every", "500", "sample snapshot period (0 = off)"),
    ("lgan.checkpoint", "lgan.ckpt", "latent-GAN checkpoint name"),
    ("rcgan.hidden_size", "48", "LSTM hidden units"),
    ("rcgan.gen_layers", "1", "generator LSTM layers"),
    ("rcgan.noise_dim", "8", "per-step noise dimension"),
    ("rcgan.iters", "3000", "training iterations"),
    ("rcgan.batch_size", "32", "max sequences per batch"),
    ("rcgan.d_lr", "0.001", "discriminator learning rate"),
    ("rcgan.g_lr", "0.001", "generator learning rate"),
    ("rcgan.snapshot_every", "500", "sample snapshot period (0 = off)"),
    ("rcgan.checkpoint", "rcgan.ckpt", "RC-GAN checkpoint name"),
    ("sample.path", "latent", "latent | rcgan"),
    ("sample.n", "200", "samples for the latent path"),
    ("sample.lengths", "30:50,70:50", "length:count pairs for the rcgan path"),
    ("sample.out_file", "generated.jsonl", "output dataset name"),
    ("eval.generated", "generated.jsonl", "generated set (JSONL)"),
    ("eval.real", "dataset.jsonl", "real set (JSONL)"),
    ("eval.runs", "5", "protocol repetitions"),
    ("eval.m_over_n", "4", "generated-to-real subsample ratio"),
    ("eval.real_size", "50", "real-side subsample size N"),
    ("eval.fraction", "0.75", "truncated-Hungarian fraction"),
    ("eval.baseline", "false", "score the real set against itself"),
    ("cluster.method", "tsne", "pca | svd | tsne"),
    ("cluster.k", "2", "components for pca/svd"),
    ("cluster.eps", "2.0", "DBSCAN radius (sweep=false)"),
    ("cluster.min_neighbors", "8", "DBSCAN density threshold (sweep=false)"),
    ("cluster.sweep", "true", "grid-search eps/min_neighbors"),
    ("cluster.balance", "true", "balance classes before encoding"),
    ("cluster.max_points", "800", "cap on points entering the embedding"),
    ("tsne.perplexity", "30", "t-SNE perplexity"),
    ("tsne.iters", "1000", "t-SNE iterations"),
    ("tsne.lr", "200", "t-SNE learning rate"),
    ("tsne.early_exaggeration", "12", "early-exaggeration factor"),
    ("tsne.exaggeration_iters", "250", "exaggeration phase length"),
    ("outliers.k", "10", "top outliers to report and plot"),
    ("plot.kind", "trajectory_lines", "trajectory_lines | scatter_embedding | matched_distance_curve | loss_curve"),
    ("plot.input", "dataset.jsonl", "input file for the plot"),
    ("plot.output", "plot.svg", "output SVG name"),
    ("plot.xlabel", "", "x-axis label"),
    ("plot.ylabel", "", "y-axis label"),
];

#[derive(Debug, Clone)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
    /// Directory all relative paths resolve against.
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn resolve(
        config_file: Option<&Path>,
        overrides: &[String],
        seed_flag: Option<u64>,
        out_dir: &Path,
    ) -> Result<RunConfig> {
        let mut values: BTreeMap<String, String> = SCHEMA
            .iter()
            .map(|(k, d, _)| (k.to_string(), d.to_string()))
            .collect();
        if let Some(path) = config_file {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    CliError::Config(format!(
                        "{}:{}: expected key=value",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                set_known(&mut values, k.trim(), v.trim())?;
            }
        }
        for pair in overrides {
            let (k, v) = pair.split_once('=').ok_or_else(|| {
                CliError::Config(format!("--override {pair:?}: expected KEY=VALUE"))
            })?;
            set_known(&mut values, k.trim(), v.trim())?;
        }
        if let Some(seed) = seed_flag {
            values.insert("seed".into(), seed.to_string());
        }
        Ok(RunConfig {
            values,
            out_dir: out_dir.to_path_buf(),
        })
    }

    pub fn str(&self, key: &str) -> &str {
        self.values
            .get(key)
            .unwrap_or_else(|| panic!("key {key:?} not in schema"))
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.str(key)
            .parse()
            .map_err(|_| CliError::Config(format!("key {key}={:?} failed to parse", self.str(key))))
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.str(key) {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            other => Err(CliError::Config(format!(
                "key {key}={other:?} is not a boolean"
            ))),
        }
    }

    /// Comma-separated list; empty string means empty list.
    pub fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let raw = self.str(key).trim();
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("key {key}: bad element {v:?}")))
            })
            .collect()
    }

    /// Resolves a config path value against the output directory.
    pub fn path(&self, key: &str) -> PathBuf {
        let raw = Path::new(self.str(key));
        if raw.is_absolute() {
            raw.to_path_buf()
        } else {
            self.out_dir.join(raw)
        }
    }

    pub fn seed(&self) -> u64 {
        self.parsed("seed").expect("seed validated at resolve time")
    }

    /// Serialized resolved configuration, sorted by key.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            out.push_str(&format!("{k}={v}\n"));
        }
        out
    }

    /// Writes `resolved.config` into the output directory.
    pub fn write_resolved(&self) -> Result<()> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::Config(format!("cannot create out dir: {e}")))?;
        std::fs::write(self.out_dir.join("resolved.config"), self.render())
            .map_err(|e| CliError::Config(format!("cannot write resolved config: {e}")))?;
        Ok(())
    }
}

fn set_known(values: &mut BTreeMap<String, String>, key: &str, value: &str) -> Result<()> {
    if !values.contains_key(key) {
        return Err(CliError::Config(format!("unknown config key {key:?}")));
    }
    values.insert(key.to_string(), value.to_string());
    Ok(())
}
