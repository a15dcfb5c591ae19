//! Deterministic standalone SVG plots. No timestamps, fixed float
//! formatting, stable element order: identical inputs produce identical
//! bytes.

use crate::errors::{CliError, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 64.0;

pub const PALETTE: &[&str] = &[
    "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#bcbd22", "#7f7f7f",
];
pub const NOISE_COLOR: &str = "#d62728";

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

pub struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    body: String,
}

impl Frame {
    /// Builds a frame over the data ranges (padded, degenerate-safe).
    pub fn new(x_range: (f64, f64), y_range: (f64, f64)) -> Frame {
        let pad = |lo: f64, hi: f64| -> (f64, f64) {
            if !(lo.is_finite() && hi.is_finite()) {
                return (0.0, 1.0);
            }
            let span = (hi - lo).abs();
            if span < 1e-12 {
                (lo - 1.0, hi + 1.0)
            } else {
                (lo - 0.05 * span, hi + 0.05 * span)
            }
        };
        let (x_min, x_max) = pad(x_range.0, x_range.1);
        let (y_min, y_max) = pad(y_range.0, y_range.1);
        Frame {
            x_min,
            x_max,
            y_min,
            y_max,
            body: String::new(),
        }
    }

    pub fn tx(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    /// SVG y grows downward; flip so larger data values plot higher.
    pub fn ty(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], color: &str) {
        if points.is_empty() {
            return;
        }
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt(self.tx(x)), fmt(self.ty(y))))
            .collect();
        self.body.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1\" stroke-opacity=\"0.75\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
    }

    pub fn circle(&mut self, x: f64, y: f64, color: &str) {
        self.body.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{color}\" fill-opacity=\"0.8\"/>\n",
            fmt(self.tx(x)),
            fmt(self.ty(y))
        ));
    }

    /// Renders the document with axes, ticks, and labels.
    pub fn render(&self, xlabel: &str, ylabel: &str) -> String {
        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        svg.push_str(&format!(
            "<rect x=\"{m}\" y=\"{m}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n",
            m = MARGIN,
            w = WIDTH - 2.0 * MARGIN,
            h = HEIGHT - 2.0 * MARGIN
        ));
        for i in 0..=4 {
            let fx = self.x_min + (self.x_max - self.x_min) * f64::from(i) / 4.0;
            let fy = self.y_min + (self.y_max - self.y_min) * f64::from(i) / 4.0;
            let px = self.tx(fx);
            let py = self.ty(fy);
            svg.push_str(&format!(
                "<line x1=\"{x}\" y1=\"{y1}\" x2=\"{x}\" y2=\"{y2}\" stroke=\"#333\"/>\n",
                x = fmt(px),
                y1 = fmt(HEIGHT - MARGIN),
                y2 = fmt(HEIGHT - MARGIN + 5.0)
            ));
            svg.push_str(&format!(
                "<text x=\"{x}\" y=\"{y}\" font-size=\"11\" text-anchor=\"middle\">{t}</text>\n",
                x = fmt(px),
                y = fmt(HEIGHT - MARGIN + 18.0),
                t = fmt(fx)
            ));
            svg.push_str(&format!(
                "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"#333\"/>\n",
                x1 = fmt(MARGIN - 5.0),
                x2 = fmt(MARGIN),
                y = fmt(py)
            ));
            svg.push_str(&format!(
                "<text x=\"{x}\" y=\"{y}\" font-size=\"11\" text-anchor=\"end\">{t}</text>\n",
                x = fmt(MARGIN - 8.0),
                y = fmt(py + 4.0),
                t = fmt(fy)
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" font-size=\"13\" text-anchor=\"middle\">{xlabel}</text>\n",
            x = fmt(WIDTH / 2.0),
            y = fmt(HEIGHT - 16.0)
        ));
        svg.push_str(&format!(
            "<text x=\"16\" y=\"{y}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {y})\">{ylabel}</text>\n",
            y = fmt(HEIGHT / 2.0)
        ));
        svg.push_str(&self.body);
        svg.push_str("</svg>\n");
        svg
    }
}

/// Bounding ranges over point sets, returning a unit box when empty.
pub fn ranges(points: impl Iterator<Item = (f64, f64)>) -> ((f64, f64), (f64, f64)) {
    let mut x = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y = (f64::INFINITY, f64::NEG_INFINITY);
    let mut any = false;
    for (px, py) in points {
        any = true;
        x.0 = x.0.min(px);
        x.1 = x.1.max(px);
        y.0 = y.0.min(py);
        y.1 = y.1.max(py);
    }
    if !any {
        ((0.0, 1.0), (0.0, 1.0))
    } else {
        (x, y)
    }
}

/// Minimal CSV reader for plot inputs: header row plus float columns,
/// non-numeric cells preserved as raw strings.
pub fn read_csv(path: &std::path::Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Other(anyhow::anyhow!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::Other(anyhow::anyhow!("{}: empty CSV", path.display())))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    Ok((header, rows))
}
