//! End-to-end CLI behavior: exit codes, artifact checks, and byte-level
//! reproducibility of outputs under a fixed seed.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_trajlab")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("trajlab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn unknown_config_key_exits_2() {
    let out = tmp_dir("badkey");
    let result = run(&[
        "synth",
        "--out",
        out.to_str().unwrap(),
        "--override",
        "nonsense.key=1",
    ]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("unknown config key"), "{stderr}");
}

#[test]
fn malformed_override_exits_2() {
    let out = tmp_dir("badoverride");
    let result = run(&["synth", "--out", out.to_str().unwrap(), "--override", "oops"]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn missing_upstream_artifact_exits_3_and_names_producer() {
    let out = tmp_dir("missing");
    let result = run(&["train", "len", "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("trajlab synth"), "{stderr}");

    // With a dataset but no autoencoder, the next missing stage is named.
    let ok = run(&[
        "synth",
        "--out",
        out.to_str().unwrap(),
        "--override",
        "synth.count_cutin=40",
        "--override",
        "synth.len_min=10",
        "--override",
        "synth.len_max=14",
    ]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let result = run(&[
        "train",
        "len",
        "--out",
        out.to_str().unwrap(),
        "--override",
        "data.allow_any_length=true",
    ]);
    assert_eq!(result.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&result.stderr).contains("trajlab train ae"));
}

#[test]
fn synth_is_byte_reproducible_and_writes_resolved_config() {
    let a = tmp_dir("repro-a");
    let b = tmp_dir("repro-b");
    for out in [&a, &b] {
        let result = run(&[
            "synth",
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "777",
            "--override",
            "synth.count_cutin=25",
            "--override",
            "synth.count_driveby_left=10",
        ]);
        assert!(result.status.success());
    }
    assert_eq!(read(&a.join("dataset.jsonl")), read(&b.join("dataset.jsonl")));
    assert_eq!(
        read(&a.join("resolved.config")),
        read(&b.join("resolved.config"))
    );
    let resolved = String::from_utf8(read(&a.join("resolved.config"))).unwrap();
    assert!(resolved.contains("seed=777"));
    assert!(resolved.contains("synth.count_cutin=25"));
}

#[test]
fn config_file_and_override_precedence() {
    let out = tmp_dir("precedence");
    let cfg_path = out.join("run.config");
    std::fs::write(&cfg_path, "synth.count_cutin=5\nseed=1\n").unwrap();
    let result = run(&[
        "synth",
        "--out",
        out.to_str().unwrap(),
        "--config",
        cfg_path.to_str().unwrap(),
        "--override",
        "synth.count_cutin=8",
    ]);
    assert!(result.status.success());
    let resolved = String::from_utf8(read(&out.join("resolved.config"))).unwrap();
    assert!(resolved.contains("synth.count_cutin=8"));
    let lines = String::from_utf8(read(&out.join("dataset.jsonl"))).unwrap();
    assert_eq!(lines.lines().count(), 8);
}

#[test]
fn plot_from_empty_dataset_is_valid_svg_and_deterministic() {
    let out = tmp_dir("plotsvg");
    std::fs::write(out.join("empty.jsonl"), "").unwrap();
    for _ in 0..2 {
        let result = run(&[
            "plot",
            "--out",
            out.to_str().unwrap(),
            "--override",
            "plot.input=empty.jsonl",
            "--override",
            "plot.output=empty.svg",
        ]);
        assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    }
    let svg = String::from_utf8(read(&out.join("empty.svg"))).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    // Axes only, no polylines.
    assert!(!svg.contains("<polyline"));
}

#[test]
fn trajectory_plot_renders_one_path_per_trajectory() {
    let out = tmp_dir("plotlines");
    let result = run(&[
        "synth",
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "3",
        "--override",
        "synth.count_cutin=7",
    ]);
    assert!(result.status.success());
    let result = run(&[
        "plot",
        "--out",
        out.to_str().unwrap(),
        "--override",
        "plot.input=dataset.jsonl",
        "--override",
        "plot.output=lines.svg",
    ]);
    assert!(result.status.success());
    let svg = String::from_utf8(read(&out.join("lines.svg"))).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 7);
}

#[test]
fn noiseless_synth_classes_confirmed_by_rule_labeler() {
    let out = tmp_dir("labelcheck");
    let result = run(&[
        "synth",
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "21",
        "--override",
        "synth.noise_std_m=0",
        "--override",
        "synth.count_cutin=50",
        "--override",
        "synth.count_driveby_left=50",
        "--override",
        "synth.count_driveby_right=50",
    ]);
    assert!(result.status.success());
    let ds = trajectory_core::load_dataset(&out.join("dataset.jsonl")).unwrap();
    let agree = ds
        .iter()
        .filter(|t| trajectory_core::rule_label_default(t) == t.label.unwrap())
        .count();
    assert_eq!(agree, ds.len(), "labeler disagreed on noiseless data");
}
