//! Repeated-run evaluation protocol: subsample generated and real sets with
//! M = m_over_n * N, compute all metrics per run, and report min/max/average.
//! The baseline variant splits one real set into disjoint halves so the real
//! data plays both roles.

use crate::error::{MetricsError, Result};
use crate::hungarian::{hungarian, matched_distances};
use crate::matrix::pairwise_matrix;
use crate::scores::{coverage_score, hungarian_truncated, matching_score};
use neural_core::Prng;
use trajectory_core::Dataset;

#[derive(Debug, Clone, Copy)]
pub struct EvalConfig {
    pub runs: usize,
    pub m_over_n: usize,
    /// Real-side subsample size per run (the protocol's N).
    pub real_size: usize,
    pub truncate_fraction: f64,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            runs: 5,
            m_over_n: 4,
            real_size: 50,
            truncate_fraction: 0.75,
            seed: 0,
        }
    }
}

/// Metrics of a single protocol run.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub matching: f64,
    pub coverage: f64,
    pub hungarian_total: f64,
    pub hungarian_truncated: f64,
    /// Hungarian-matched pair distances, ascending (the threshold-curve data).
    pub matched_distances: Vec<f64>,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub min: f64,
    pub max: f64,
    pub avg: f64,
}

impl Summary {
    fn over(values: impl Iterator<Item = f64> + Clone) -> Summary {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        let mut count = 0usize;
        for v in values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
            count += 1;
        }
        Summary {
            min,
            max,
            avg: sum / count as f64,
        }
    }
}

/// Per-run reports plus min/max/average for each metric.
#[derive(Debug, Clone)]
pub struct EvalStats {
    pub runs: Vec<EvalReport>,
    pub matching: Summary,
    pub coverage: Summary,
    pub hungarian_total: Summary,
    pub hungarian_truncated: Summary,
}

impl EvalStats {
    fn from_runs(runs: Vec<EvalReport>) -> EvalStats {
        EvalStats {
            matching: Summary::over(runs.iter().map(|r| r.matching)),
            coverage: Summary::over(runs.iter().map(|r| r.coverage)),
            hungarian_total: Summary::over(runs.iter().map(|r| r.hungarian_total)),
            hungarian_truncated: Summary::over(runs.iter().map(|r| r.hungarian_truncated)),
            runs,
        }
    }
}

fn one_run(
    gs: &Dataset,
    rs: &Dataset,
    cfg: &EvalConfig,
    run_idx: usize,
    rng: &mut Prng,
) -> Result<EvalReport> {
    let n = cfg.real_size.min(rs.len());
    let m = cfg.m_over_n * n;
    if gs.len() < m {
        return Err(MetricsError::InsufficientData(format!(
            "generated set has {} samples, protocol needs {m}",
            gs.len()
        )));
    }
    let real_idx = rng.sample_indices(rs.len(), n);
    let gen_idx = rng.sample_indices(gs.len(), m);
    let real_sub = rs.subset(&real_idx);
    let gen_sub = gs.subset(&gen_idx);

    let dm = pairwise_matrix(&gen_sub, &real_sub)?;
    let matching = matching_score(&dm);
    let coverage = coverage_score(&dm);

    // One-to-one matching needs equal sizes: uniformly subsample the larger
    // (generated) side down to N; the gen rows are already in shuffled order.
    let square = dm.take_rows(n);
    let (assignment, total) = hungarian(&square)?;
    let matched = matched_distances(&square, &assignment);
    let truncated = hungarian_truncated(&matched, cfg.truncate_fraction)?;

    Ok(EvalReport {
        matching,
        coverage,
        hungarian_total: total,
        hungarian_truncated: truncated,
        matched_distances: matched,
        m,
        n,
        seed: cfg.seed ^ run_idx as u64,
    })
}

/// Compares a generated set against a real set over `cfg.runs` subsampled
/// repetitions.
pub fn evaluate_sets(gs: &Dataset, rs: &Dataset, cfg: &EvalConfig) -> Result<EvalStats> {
    if gs.is_empty() {
        return Err(MetricsError::EmptySet("generated"));
    }
    if rs.is_empty() {
        return Err(MetricsError::EmptySet("real"));
    }
    let root = Prng::new(cfg.seed);
    let mut runs = Vec::with_capacity(cfg.runs);
    for r in 0..cfg.runs {
        let mut rng = root.derive(&format!("eval-run-{r}"));
        runs.push(one_run(gs, rs, cfg, r, &mut rng)?);
    }
    Ok(EvalStats::from_runs(runs))
}

/// Baseline protocol: per run, draw disjoint real/generated parts from one
/// real set, so the scores show what "as good as real" looks like.
pub fn baseline_split_eval(rs: &Dataset, cfg: &EvalConfig) -> Result<EvalStats> {
    if rs.is_empty() {
        return Err(MetricsError::EmptySet("real"));
    }
    let n = cfg.real_size.min(rs.len());
    let m = cfg.m_over_n * n;
    if rs.len() < n + m {
        return Err(MetricsError::InsufficientData(format!(
            "baseline split needs {} samples ({} real + {} generated), got {}",
            n + m,
            n,
            m,
            rs.len()
        )));
    }
    let root = Prng::new(cfg.seed);
    let mut runs = Vec::with_capacity(cfg.runs);
    for r in 0..cfg.runs {
        let mut rng = root.derive(&format!("baseline-run-{r}"));
        let mut order: Vec<usize> = (0..rs.len()).collect();
        rng.shuffle(&mut order);
        let real_sub = rs.subset(&order[..n]);
        let gen_sub = rs.subset(&order[n..n + m]);

        let dm = pairwise_matrix(&gen_sub, &real_sub)?;
        let matching = matching_score(&dm);
        let coverage = coverage_score(&dm);
        let square = dm.take_rows(n);
        let (assignment, total) = hungarian(&square)?;
        let matched = matched_distances(&square, &assignment);
        let truncated = hungarian_truncated(&matched, cfg.truncate_fraction)?;
        runs.push(EvalReport {
            matching,
            coverage,
            hungarian_total: total,
            hungarian_truncated: truncated,
            matched_distances: matched,
            m,
            n,
            seed: cfg.seed ^ r as u64,
        });
    }
    Ok(EvalStats::from_runs(runs))
}
