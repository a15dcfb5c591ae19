//! Training telemetry shared by both generative paths.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GanIterStats {
    pub iter: usize,
    pub d_loss: f64,
    pub g_loss: f64,
    /// Unweighted gradient-penalty value; only present for WGAN-GP critics.
    pub gp: Option<f64>,
}

/// Raw sample rows captured mid-training (latent vectors or flattened
/// trajectory coordinates, depending on the path).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSnapshot {
    pub iter: usize,
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GanTrainReport {
    pub rows: Vec<GanIterStats>,
    pub snapshots: Vec<SampleSnapshot>,
}

impl GanTrainReport {
    /// `iter,d_loss,g_loss,gp` with an empty gp column where not applicable.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,d_loss,g_loss,gp\n");
        for row in &self.rows {
            let gp = row.gp.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.iter, row.d_loss, row.g_loss, gp
            ));
        }
        out
    }

    pub fn all_finite(&self) -> bool {
        self.rows.iter().all(|r| {
            r.d_loss.is_finite()
                && r.g_loss.is_finite()
                && r.gp.map_or(true, f64::is_finite)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_optional_gp() {
        let report = GanTrainReport {
            rows: vec![
                GanIterStats {
                    iter: 1,
                    d_loss: 0.5,
                    g_loss: 1.0,
                    gp: Some(0.25),
                },
                GanIterStats {
                    iter: 2,
                    d_loss: 0.4,
                    g_loss: 1.1,
                    gp: None,
                },
            ],
            snapshots: vec![],
        };
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "iter,d_loss,g_loss,gp");
        assert_eq!(lines[1], "1,0.5,1,0.25");
        assert_eq!(lines[2], "2,0.4,1.1,");
    }
}
