//! Class balancing before clustering: oversample small classes with
//! replacement, uniformly downsample large ones, both to the median class
//! size.

use crate::error::{AnalysisError, Result};
use neural_core::Prng;
use trajectory_core::{Dataset, ScenarioLabel, Trajectory};

pub fn balance_by_label(ds: &Dataset, rng: &mut Prng) -> Result<Dataset> {
    if ds.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let mut groups: std::collections::BTreeMap<&'static str, Vec<usize>> = Default::default();
    for (i, t) in ds.iter().enumerate() {
        let label = t.label.unwrap_or(ScenarioLabel::Unknown);
        groups.entry(label.tag()).or_default().push(i);
    }
    let mut sizes: Vec<usize> = groups.values().map(Vec::len).collect();
    sizes.sort_unstable();
    let target = sizes[sizes.len() / 2];

    let mut out: Vec<Trajectory> = Vec::with_capacity(target * groups.len());
    for members in groups.values() {
        if members.len() >= target {
            let mut idx = members.clone();
            rng.shuffle(&mut idx);
            idx.truncate(target);
            idx.sort_unstable();
            out.extend(idx.into_iter().map(|i| ds.trajectories[i].clone()));
        } else {
            out.extend(members.iter().map(|&i| ds.trajectories[i].clone()));
            for extra in 0..(target - members.len()) {
                let pick = members[rng.below(members.len())];
                let mut t = ds.trajectories[pick].clone();
                t.id = format!("{}~{extra}", t.id);
                out.push(t);
            }
        }
    }
    Ok(Dataset {
        trajectories: out,
        norm_stats: ds.norm_stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labeled(count: usize, label: ScenarioLabel, prefix: &str) -> Vec<Trajectory> {
        (0..count)
            .map(|i| {
                Trajectory::new(
                    format!("{prefix}{i}"),
                    vec![(0.0, i as f64), (1.0, i as f64)],
                    Some(label),
                )
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn balances_to_median_class_size() {
        let mut trajs = labeled(40, ScenarioLabel::DriveByLeft, "l");
        trajs.extend(labeled(10, ScenarioLabel::CutIn, "c"));
        trajs.extend(labeled(20, ScenarioLabel::DriveByRight, "r"));
        let ds = Dataset::new(trajs).unwrap();
        let out = balance_by_label(&ds, &mut Prng::new(1)).unwrap();
        let count = |l: ScenarioLabel| out.iter().filter(|t| t.label == Some(l)).count();
        assert_eq!(count(ScenarioLabel::CutIn), 20);
        assert_eq!(count(ScenarioLabel::DriveByLeft), 20);
        assert_eq!(count(ScenarioLabel::DriveByRight), 20);
        // Unique ids preserved.
        let ids: std::collections::HashSet<&str> =
            out.iter().map(|t| t.id.as_str()).collect();
        assert_eq!(ids.len(), out.len());
    }

    #[test]
    fn deterministic_under_seed() {
        let mut trajs = labeled(15, ScenarioLabel::DriveByLeft, "l");
        trajs.extend(labeled(5, ScenarioLabel::CutIn, "c"));
        let ds = Dataset::new(trajs).unwrap();
        let a = balance_by_label(&ds, &mut Prng::new(7)).unwrap();
        let b = balance_by_label(&ds, &mut Prng::new(7)).unwrap();
        assert_eq!(a, b);
    }
}
