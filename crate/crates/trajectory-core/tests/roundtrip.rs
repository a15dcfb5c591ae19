//! Dataset round-trip and normalization properties.

use proptest::prelude::*;
use trajectory_core::{
    denormalize, fit_normalization, load_dataset_with, normalize, save_dataset, Dataset,
    IngestOptions, ScenarioLabel, Trajectory,
};

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("trajectory-roundtrip-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn finite_coord() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6..1e6f64,
        Just(0.0),
        Just(-0.0),
        Just(1.5e-30),
        Just(123.456789012345678),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn save_load_preserves_coordinates_bitwise(
        trajs in prop::collection::vec(
            prop::collection::vec((finite_coord(), finite_coord()), 1..40),
            1..8,
        )
    ) {
        let dataset = Dataset::new(
            trajs
                .into_iter()
                .enumerate()
                .map(|(i, pts)| {
                    Trajectory::new(format!("t{i}"), pts, Some(ScenarioLabel::CutIn)).unwrap()
                })
                .collect(),
        )
        .unwrap();
        let path = tmp(&format!("p{}.jsonl", dataset.len()));
        save_dataset(&dataset, &path).unwrap();
        let back = load_dataset_with(&path, IngestOptions { allow_any_length: true }).unwrap();
        prop_assert_eq!(back.len(), dataset.len());
        for (a, b) in dataset.iter().zip(back.iter()) {
            prop_assert_eq!(&a.id, &b.id);
            prop_assert_eq!(a.points.len(), b.points.len());
            for (pa, pb) in a.points.iter().zip(&b.points) {
                prop_assert_eq!(pa.0.to_bits(), pb.0.to_bits());
                prop_assert_eq!(pa.1.to_bits(), pb.1.to_bits());
            }
        }
    }

    #[test]
    fn normalize_denormalize_roundtrip(
        trajs in prop::collection::vec(
            prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 2..30),
            1..6,
        )
    ) {
        let dataset = Dataset::new(
            trajs
                .into_iter()
                .enumerate()
                .map(|(i, pts)| Trajectory::new(format!("t{i}"), pts, None).unwrap())
                .collect(),
        )
        .unwrap();
        let stats = fit_normalization(&dataset).unwrap();
        let round = denormalize(&normalize(&dataset, &stats), &stats);
        for (a, b) in dataset.iter().zip(round.iter()) {
            for (pa, pb) in a.points.iter().zip(&b.points) {
                prop_assert!((pa.0 - pb.0).abs() < 1e-9);
                prop_assert!((pa.1 - pb.1).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn three_trajectory_file_has_three_lines() {
    let pts: Vec<(f64, f64)> = (0..30).map(|i| (1.0, i as f64)).collect();
    let ds = Dataset::new(
        (0..3)
            .map(|i| Trajectory::new(format!("t{i}"), pts.clone(), None).unwrap())
            .collect(),
    )
    .unwrap();
    let path = tmp("three_lines.jsonl");
    save_dataset(&ds, &path).unwrap();
    let content = std::fs::read_to_string(&path).unwrap();
    assert_eq!(content.lines().count(), 3);
}
