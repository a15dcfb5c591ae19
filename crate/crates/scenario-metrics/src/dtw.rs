//! Dynamic time warping over (lat, lon) trajectories: full warping window,
//! Euclidean local cost, unnormalized optimal path cost.

use crate::error::{MetricsError, Result};
use trajectory_core::Trajectory;

fn euclid(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dl = a.0 - b.0;
    let dn = a.1 - b.1;
    (dl * dl + dn * dn).sqrt()
}

pub fn dtw(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    dtw_points(&a.points, &b.points)
}

pub fn dtw_points(pa: &[(f64, f64)], pb: &[(f64, f64)]) -> Result<f64> {
    if pa.is_empty() || pb.is_empty() {
        return Err(MetricsError::EmptyTrajectory);
    }
    let m = pb.len();
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut cur = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for &ap in pa {
        cur[0] = f64::INFINITY;
        for j in 1..=m {
            let cost = euclid(ap, pb[j - 1]);
            cur[j] = cost + prev[j].min(cur[j - 1]).min(prev[j - 1]);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m])
}

#[cfg(test)]
mod tests {
    use super::*;
    use neural_core::Prng;

    fn traj(points: Vec<(f64, f64)>) -> Trajectory {
        Trajectory::new("t", points, None).unwrap()
    }

    #[test]
    fn identical_trajectories_have_zero_distance() {
        let t = traj(vec![(0.0, 1.0), (1.0, 2.0), (0.5, 3.0)]);
        assert_eq!(dtw(&t, &t).unwrap(), 0.0);
    }

    #[test]
    fn known_one_dimensional_case() {
        // Hand-computed DP table: [1,2,3] vs [1,3] embedded as lon.
        let a = traj(vec![(0.0, 1.0), (0.0, 2.0), (0.0, 3.0)]);
        let b = traj(vec![(0.0, 1.0), (0.0, 3.0)]);
        assert_eq!(dtw(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn symmetric_on_random_pairs() {
        let mut rng = Prng::new(13);
        for _ in 0..50 {
            let na = 2 + rng.below(20);
            let nb = 2 + rng.below(20);
            let a = traj((0..na).map(|_| (rng.range(-5.0, 5.0), rng.range(0.0, 100.0))).collect());
            let b = traj((0..nb).map(|_| (rng.range(-5.0, 5.0), rng.range(0.0, 100.0))).collect());
            let ab = dtw(&a, &b).unwrap();
            let ba = dtw(&b, &a).unwrap();
            assert!((ab - ba).abs() < 1e-12);
            assert!(ab >= 0.0);
        }
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(
            dtw_points(&[], &[(0.0, 0.0)]),
            Err(MetricsError::EmptyTrajectory)
        ));
    }
}
