//! `trajlab plot`: render one SVG from a dataset or CSV produced by the
//! other commands.

use crate::config::RunConfig;
use crate::errors::{require_artifact, CliError, Result};
use crate::svg::{ranges, read_csv, Frame, NOISE_COLOR, PALETTE};
use trajectory_core::{load_dataset_with, IngestOptions, ScenarioLabel};

pub fn run(cfg: &RunConfig) -> Result<()> {
    let input = cfg.path("plot.input");
    require_artifact(&input, "an earlier trajlab command (plot.input)")?;
    let output = cfg.path("plot.output");
    let xlabel = cfg.str("plot.xlabel").to_string();
    let ylabel = cfg.str("plot.ylabel").to_string();
    let svg = match cfg.str("plot.kind") {
        "trajectory_lines" => trajectory_lines(cfg, &input, &xlabel, &ylabel)?,
        "scatter_embedding" => scatter_embedding(&input, &xlabel, &ylabel)?,
        "matched_distance_curve" => matched_distance_curve(&input, &xlabel, &ylabel)?,
        "loss_curve" => loss_curve(&input, &xlabel, &ylabel)?,
        other => {
            return Err(CliError::Config(format!(
                "plot.kind {other:?} is not one of trajectory_lines, scatter_embedding, matched_distance_curve, loss_curve"
            )))
        }
    };
    std::fs::write(&output, svg)?;
    println!("wrote {}", output.display());
    Ok(())
}

fn label_color(label: Option<ScenarioLabel>) -> &'static str {
    match label {
        Some(ScenarioLabel::CutIn) => "#d62728",
        Some(ScenarioLabel::DriveByLeft) => "#9467bd",
        Some(ScenarioLabel::DriveByRight) => "#2ca02c",
        _ => "#7f7f7f",
    }
}

fn trajectory_lines(
    cfg: &RunConfig,
    input: &std::path::Path,
    xlabel: &str,
    ylabel: &str,
) -> Result<String> {
    let ds = load_dataset_with(
        input,
        IngestOptions {
            allow_any_length: cfg.bool("data.allow_any_length")?,
        },
    )?;
    let (xr, yr) = ranges(ds.iter().flat_map(|t| t.points.iter().map(|&(lat, lon)| (lon, lat))));
    let mut frame = Frame::new(xr, yr);
    for t in ds.iter() {
        let line: Vec<(f64, f64)> = t.points.iter().map(|&(lat, lon)| (lon, lat)).collect();
        frame.polyline(&line, label_color(t.label));
    }
    let xl = if xlabel.is_empty() { "longitudinal distance (m)" } else { xlabel };
    let yl = if ylabel.is_empty() { "lateral distance (m)" } else { ylabel };
    Ok(frame.render(xl, yl))
}

fn scatter_embedding(input: &std::path::Path, xlabel: &str, ylabel: &str) -> Result<String> {
    let (header, rows) = read_csv(input)?;
    let col = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Other(anyhow::anyhow!("column {name:?} missing")))
    };
    let (xi, yi, ci) = (col("x")?, col("y")?, col("cluster")?);
    let pts: Vec<(f64, f64, i64)> = rows
        .iter()
        .map(|r| {
            Ok((
                r[xi].parse::<f64>().map_err(|_| CliError::Other(anyhow::anyhow!("bad x")))?,
                r[yi].parse::<f64>().map_err(|_| CliError::Other(anyhow::anyhow!("bad y")))?,
                r[ci].parse::<i64>().unwrap_or(-1),
            ))
        })
        .collect::<Result<_>>()?;
    let (xr, yr) = ranges(pts.iter().map(|&(x, y, _)| (x, y)));
    let mut frame = Frame::new(xr, yr);
    for &(x, y, c) in &pts {
        let color = if c < 0 {
            NOISE_COLOR
        } else {
            PALETTE[c as usize % PALETTE.len()]
        };
        frame.circle(x, y, color);
    }
    let xl = if xlabel.is_empty() { "component 1" } else { xlabel };
    let yl = if ylabel.is_empty() { "component 2" } else { ylabel };
    Ok(frame.render(xl, yl))
}

fn matched_distance_curve(input: &std::path::Path, xlabel: &str, ylabel: &str) -> Result<String> {
    let (_, rows) = read_csv(input)?;
    // Expect run,rank,distance.
    let mut curves: std::collections::BTreeMap<usize, Vec<(f64, f64)>> = Default::default();
    for r in &rows {
        let run: usize = r[0].parse().unwrap_or(0);
        let rank: f64 = r[1].parse().unwrap_or(0.0);
        let dist: f64 = r[2].parse().unwrap_or(0.0);
        curves.entry(run).or_default().push((rank, dist));
    }
    let (xr, yr) = ranges(curves.values().flatten().copied());
    let mut frame = Frame::new(xr, yr);
    for (run, pts) in &curves {
        frame.polyline(pts, PALETTE[run % PALETTE.len()]);
    }
    let xl = if xlabel.is_empty() { "matched pair rank" } else { xlabel };
    let yl = if ylabel.is_empty() { "distance" } else { ylabel };
    Ok(frame.render(xl, yl))
}

fn loss_curve(input: &std::path::Path, xlabel: &str, ylabel: &str) -> Result<String> {
    let (header, rows) = read_csv(input)?;
    // First column is the step axis, remaining numeric columns are series.
    let mut series: Vec<(String, Vec<(f64, f64)>)> = header[1..]
        .iter()
        .map(|name| (name.clone(), Vec::new()))
        .collect();
    for r in &rows {
        let Ok(x) = r[0].parse::<f64>() else { continue };
        for (ci, (_, pts)) in series.iter_mut().enumerate() {
            if let Some(Ok(v)) = r.get(ci + 1).map(|s| s.parse::<f64>()) {
                pts.push((x, v));
            }
        }
    }
    let (xr, yr) = ranges(series.iter().flat_map(|(_, pts)| pts.iter().copied()));
    let mut frame = Frame::new(xr, yr);
    for (i, (_, pts)) in series.iter().enumerate() {
        frame.polyline(pts, PALETTE[i % PALETTE.len()]);
    }
    let xl = if xlabel.is_empty() { &header[0] } else { xlabel };
    let yl = if ylabel.is_empty() { "loss" } else { ylabel };
    Ok(frame.render(xl, yl))
}
