//! `trajlab eval`: the repeated-run set-comparison protocol, emitting
//! per-run and summary tables plus the matched-distance curves.

use crate::config::RunConfig;
use crate::errors::{require_artifact, Result};
use scenario_metrics::{baseline_split_eval, evaluate_sets, EvalConfig, EvalStats, Summary};
use trajectory_core::{load_dataset_with, IngestOptions};

pub fn run(cfg: &RunConfig) -> Result<()> {
    let ingest = IngestOptions {
        allow_any_length: cfg.bool("data.allow_any_length")?,
    };
    let eval_cfg = EvalConfig {
        runs: cfg.parsed("eval.runs")?,
        m_over_n: cfg.parsed("eval.m_over_n")?,
        real_size: cfg.parsed("eval.real_size")?,
        truncate_fraction: cfg.parsed("eval.fraction")?,
        seed: cfg.seed(),
    };
    let real_path = cfg.path("eval.real");
    require_artifact(&real_path, "trajlab synth (or point eval.real at a dataset)")?;
    let real = load_dataset_with(&real_path, ingest)?;

    let (stats, label) = if cfg.bool("eval.baseline")? {
        (baseline_split_eval(&real, &eval_cfg)?, "real-set baseline")
    } else {
        let gen_path = cfg.path("eval.generated");
        require_artifact(&gen_path, "trajlab sample")?;
        let generated = load_dataset_with(&gen_path, ingest)?;
        (
            evaluate_sets(&generated, &real, &eval_cfg)?,
            "generated vs real",
        )
    };

    write_tables(cfg, &stats, label)?;
    println!(
        "{label}: matching avg {:.3}, coverage avg {:.3}, hungarian avg {:.3}, truncated avg {:.3}",
        stats.matching.avg, stats.coverage.avg, stats.hungarian_total.avg, stats.hungarian_truncated.avg
    );
    Ok(())
}

fn write_tables(cfg: &RunConfig, stats: &EvalStats, label: &str) -> Result<()> {
    let mut runs_csv = String::from(
        "run,matching,coverage,hungarian_total,hungarian_truncated,m,n\n",
    );
    for (i, r) in stats.runs.iter().enumerate() {
        runs_csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            i, r.matching, r.coverage, r.hungarian_total, r.hungarian_truncated, r.m, r.n
        ));
    }
    std::fs::write(cfg.out_dir.join("eval_runs.csv"), runs_csv)?;

    let mut summary_csv = String::from("metric,min,max,avg\n");
    for (name, s) in metric_rows(stats) {
        summary_csv.push_str(&format!("{name},{},{},{}\n", s.min, s.max, s.avg));
    }
    std::fs::write(cfg.out_dir.join("eval_summary.csv"), summary_csv)?;

    let mut text = format!("{label} over {} runs\n", stats.runs.len());
    text.push_str(&format!(
        "{:<22}{:>12}{:>12}{:>12}\n",
        "metric", "min", "max", "average"
    ));
    for (name, s) in metric_rows(stats) {
        text.push_str(&format!(
            "{name:<22}{:>12.4}{:>12.4}{:>12.4}\n",
            s.min, s.max, s.avg
        ));
    }
    std::fs::write(cfg.out_dir.join("eval_summary.txt"), text)?;

    // Matched-distance curves: one row per (run, rank).
    let mut curve = String::from("run,rank,distance\n");
    for (i, r) in stats.runs.iter().enumerate() {
        for (rank, d) in r.matched_distances.iter().enumerate() {
            curve.push_str(&format!("{i},{rank},{d}\n"));
        }
    }
    std::fs::write(cfg.out_dir.join("matched_distances.csv"), curve)?;
    Ok(())
}

fn metric_rows(stats: &EvalStats) -> [(&'static str, Summary); 4] {
    [
        ("matching", stats.matching),
        ("coverage", stats.coverage),
        ("hungarian_total", stats.hungarian_total),
        ("hungarian_truncated", stats.hungarian_truncated),
    ]
}
