//! `trajlab synth`: write a labeled synthetic dataset.

use crate::config::RunConfig;
use crate::errors::{CliError, Result};
use neural_core::Prng;
use trajectory_core::{save_dataset, synth_scenario, Dataset, ScenarioLabel, SynthParams};

pub fn params_from_config(cfg: &RunConfig) -> Result<SynthParams> {
    let params = SynthParams {
        lane_offset_m: cfg.parsed("synth.lane_offset_m")?,
        lon_range_m: (cfg.parsed("synth.lon_min_m")?, cfg.parsed("synth.lon_max_m")?),
        accel_range_mps2: (cfg.parsed("synth.accel_min")?, cfg.parsed("synth.accel_max")?),
        noise_std_m: cfg.parsed("synth.noise_std_m")?,
        length_range: (cfg.parsed("synth.len_min")?, cfg.parsed("synth.len_max")?),
        decel_fraction: cfg.parsed("synth.decel_fraction")?,
    };
    params
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(params)
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    let params = params_from_config(cfg)?;
    let classes: &[(&str, ScenarioLabel)] = &[
        ("synth.count_cutin", ScenarioLabel::CutIn),
        ("synth.count_driveby_left", ScenarioLabel::DriveByLeft),
        ("synth.count_driveby_right", ScenarioLabel::DriveByRight),
        ("synth.count_unknown", ScenarioLabel::Unknown),
    ];
    let mut rng = Prng::new(cfg.seed()).derive("synth");
    let mut trajectories = Vec::new();
    for (key, kind) in classes {
        let count: usize = cfg.parsed(key)?;
        for i in 0..count {
            let mut t = synth_scenario(*kind, &params, &mut rng);
            t.id = format!("{}_{i:05}", kind.tag());
            trajectories.push(t);
        }
    }
    if trajectories.is_empty() {
        return Err(CliError::Config(
            "all synth.count_* are zero; nothing to generate".into(),
        ));
    }
    let dataset = Dataset::new(trajectories)?;
    let out = cfg.path("synth.out_file");
    save_dataset(&dataset, &out)?;
    println!("wrote {} trajectories to {}", dataset.len(), out.display());
    Ok(())
}
