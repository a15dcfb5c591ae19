//! JSON Lines dataset files: one trajectory per line,
//! `{"id": ..., "label": ..., "points": [[lat,lon],...]}`, meters, 10 Hz.

use crate::error::{Result, TrajectoryError};
use crate::types::{Dataset, ScenarioLabel, Trajectory, MAX_FRAMES, MIN_FRAMES};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Serialize, Deserialize)]
struct Record {
    id: String,
    label: String,
    points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// Accept trajectories outside the [30,70]-frame range.
    pub allow_any_length: bool,
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    load_dataset_with(path, IngestOptions::default())
}

pub fn load_dataset_with(path: &Path, opts: IngestOptions) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut trajectories = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let record: Record = serde_json::from_str(&line).map_err(|source| {
            TrajectoryError::Parse {
                line: line_no,
                source,
            }
        })?;
        let label = ScenarioLabel::from_tag(&record.label).ok_or_else(|| {
            TrajectoryError::UnknownLabel {
                line: line_no,
                label: record.label.clone(),
            }
        })?;
        let len = record.points.len();
        if !opts.allow_any_length && !(MIN_FRAMES..=MAX_FRAMES).contains(&len) {
            return Err(TrajectoryError::LengthOutOfRange {
                id: record.id,
                len,
                lo: MIN_FRAMES,
                hi: MAX_FRAMES,
            });
        }
        trajectories.push(Trajectory::new(record.id, record.points, Some(label))?);
    }
    Dataset::new(trajectories)
}

pub fn save_dataset(ds: &Dataset, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut writer = BufWriter::new(file);
    for t in &ds.trajectories {
        let record = Record {
            id: t.id.clone(),
            label: t.label.unwrap_or(ScenarioLabel::Unknown).tag().to_string(),
            points: t.points.clone(),
        };
        // serde_json emits the shortest representation that round-trips, so
        // coordinates reload bitwise-equal.
        serde_json::to_writer(&mut writer, &record).map_err(|e| {
            TrajectoryError::Io(std::io::Error::new(std::io::ErrorKind::Other, e))
        })?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("trajectory-core-io-tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn three_valid_records_load() {
        let path = tmp("three.jsonl");
        let pts: Vec<(f64, f64)> = (0..30).map(|i| (3.5, i as f64)).collect();
        let json = serde_json::to_string(&pts).unwrap();
        let mut content = String::new();
        for i in 0..3 {
            content.push_str(&format!(
                "{{\"id\":\"t{i}\",\"label\":\"cutin\",\"points\":{json}}}\n"
            ));
        }
        std::fs::write(&path, content).unwrap();
        let ds = load_dataset(&path).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.trajectories[0].label, Some(ScenarioLabel::CutIn));
    }

    #[test]
    fn short_record_rejected_without_override() {
        let path = tmp("short.jsonl");
        let pts: Vec<(f64, f64)> = (0..20).map(|i| (0.0, i as f64)).collect();
        let json = serde_json::to_string(&pts).unwrap();
        std::fs::write(
            &path,
            format!("{{\"id\":\"s\",\"label\":\"unknown\",\"points\":{json}}}\n"),
        )
        .unwrap();
        assert!(matches!(
            load_dataset(&path),
            Err(TrajectoryError::LengthOutOfRange { len: 20, .. })
        ));
        let ds = load_dataset_with(
            &path,
            IngestOptions {
                allow_any_length: true,
            },
        )
        .unwrap();
        assert_eq!(ds.trajectories[0].len(), 20);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let path = tmp("bad.jsonl");
        std::fs::write(&path, "{\"id\":\"a\",\"label\":\"cutin\",\"points\":[[0,0]]}\nnot json\n")
            .unwrap();
        let err = load_dataset_with(
            &path,
            IngestOptions {
                allow_any_length: true,
            },
        )
        .unwrap_err();
        match err {
            TrajectoryError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_dataset_saves_empty_file() {
        let path = tmp("empty.jsonl");
        save_dataset(&Dataset::default(), &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let path = tmp("dup.jsonl");
        let line = "{\"id\":\"x\",\"label\":\"cutin\",\"points\":[[0.0,1.0]]}\n";
        std::fs::write(&path, format!("{line}{line}")).unwrap();
        assert!(matches!(
            load_dataset_with(
                &path,
                IngestOptions {
                    allow_any_length: true
                }
            ),
            Err(TrajectoryError::DuplicateId(_))
        ));
    }
}
