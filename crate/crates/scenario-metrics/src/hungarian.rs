//! Optimal one-to-one assignment minimizing total pairwise distance
//! (shortest augmenting path with potentials, O(n^3)).

use crate::error::{MetricsError, Result};
use crate::matrix::DistanceMatrix;

/// Returns the optimal assignment as (row, col) pairs ordered by row, plus
/// the total assigned cost. The matrix must be square.
pub fn hungarian(dm: &DistanceMatrix) -> Result<(Vec<(usize, usize)>, f64)> {
    let n = dm.rows();
    if n != dm.cols() {
        return Err(MetricsError::NonSquare {
            rows: dm.rows(),
            cols: dm.cols(),
        });
    }
    if n == 0 {
        return Err(MetricsError::EmptySet("assignment"));
    }
    let cost = &dm.d;

    // 1-indexed potentials; p[j] is the row matched to column j.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment: Vec<(usize, usize)> = (1..=n).map(|j| (p[j] - 1, j - 1)).collect();
    assignment.sort_unstable();
    let total = assignment.iter().map(|&(i, j)| cost[i][j]).sum();
    Ok((assignment, total))
}

/// Distances of the assigned pairs, sorted ascending.
pub fn matched_distances(dm: &DistanceMatrix, assignment: &[(usize, usize)]) -> Vec<f64> {
    let mut dists: Vec<f64> = assignment.iter().map(|&(i, j)| dm.d[i][j]).collect();
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    dists
}

#[cfg(test)]
pub(crate) fn brute_force_min_total(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut cols, 0, &mut |perm| {
        let total: f64 = perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        if total < best {
            best = total;
        }
    });
    best
}

#[cfg(test)]
fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}
