use crate::cloud::{distance, PointCloud};
use crate::error::{Error, Result};
use crate::sum::compensated_sum;
use rayon::prelude::*;

/// Largest cloud size accepted by the O(n^3) exact solver.
pub const EXACT_EMD_CAP: usize = 1024;

fn check_pair(pred: &PointCloud, target: &PointCloud) -> Result<usize> {
    pred.ensure_non_empty("predicted")?;
    target.ensure_non_empty("target")?;
    pred.ensure_same_dim(target)?;
    if pred.len() != target.len() {
        return Err(Error::SizeMismatch(pred.len(), target.len()));
    }
    Ok(pred.len())
}

/// Minimum-cost perfect assignment for a square cost matrix given row-major.
///
/// Shortest augmenting paths with row/column potentials (Hungarian method,
/// O(n^3)). Returns `assignment[row] = column`.
pub fn min_cost_assignment(n: usize, cost: &[f64]) -> Vec<usize> {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    // 1-based arrays with a virtual column 0.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0f64; n + 1];
    let mut used = vec![false; n + 1];
    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|m| *m = f64::INFINITY);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            let row = &cost[(i0 - 1) * n..i0 * n];
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = row[j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[row_of_col[j] - 1] = j - 1;
    }
    assignment
}

fn assignment_cost(pred: &PointCloud, target: &PointCloud, assignment: &[usize]) -> f64 {
    compensated_sum(assignment.iter().enumerate().map(|(i, &j)| distance(pred.point(i), target.point(j))))
}

/// Exact EMD as a total transport distance (sum over the optimal matching).
pub fn emd_exact_sum(pred: &PointCloud, target: &PointCloud) -> Result<f64> {
    let n = check_pair(pred, target)?;
    if n > EXACT_EMD_CAP {
        return Err(Error::ExactEmdTooLarge { cap: EXACT_EMD_CAP, got: n });
    }
    let mut cost = Vec::with_capacity(n * n);
    for p in pred.iter() {
        cost.extend(target.iter().map(|g| distance(p, g)));
    }
    let assignment = min_cost_assignment(n, &cost);
    Ok(assignment_cost(pred, target, &assignment))
}

/// Exact EMD reported as the mean matched distance.
pub fn emd_exact(pred: &PointCloud, target: &PointCloud) -> Result<f64> {
    Ok(emd_exact_sum(pred, target)? / pred.len() as f64)
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Approximate EMD (mean matched distance) for clouds too large for the exact solver.
///
/// Runs log-domain Sinkhorn iterations with entropic regularization `epsilon`
/// (in distance units). After every iteration the current transport plan is
/// rounded greedily to a one-to-one matching; the cheapest matching seen so
/// far is reported. Every reported value is the cost of a feasible matching,
/// so it never undercuts the exact EMD, and it cannot increase with more
/// iterations.
pub fn emd_approx(pred: &PointCloud, target: &PointCloud, iterations: usize, epsilon: f64) -> Result<f64> {
    let n = check_pair(pred, target)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if iterations == 0 {
        return Err(Error::invalid("emd_approx needs at least one iteration"));
    }
    let log_mass = -(n as f64).ln();
    let cost = |i: usize, j: usize| distance(pred.point(i), target.point(j));
    let mut f = vec![0.0f64; n];
    let mut g = vec![0.0f64; n];
    let mut best = f64::INFINITY;
    for _ in 0..iterations {
        f = (0..n)
            .into_par_iter()
            .map(|i| epsilon * (log_mass - log_sum_exp((0..n).map(|j| (g[j] - cost(i, j)) / epsilon))))
            .collect();
        g = (0..n)
            .into_par_iter()
            .map(|j| epsilon * (log_mass - log_sum_exp((0..n).map(|i| (f[i] - cost(i, j)) / epsilon))))
            .collect();
        let assignment = round_plan(n, |i, j| f[i] + g[j] - cost(i, j));
        best = best.min(assignment_cost(pred, target, &assignment) / n as f64);
    }
    Ok(best)
}

/// Greedy rounding of a (log-)plan: rows claim their best free column in
/// order of decreasing row maximum.
fn round_plan(n: usize, score: impl Fn(usize, usize) -> f64 + Sync) -> Vec<usize> {
    let row_best: Vec<(usize, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| (j, score(i, j)))
                .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
        })
        .collect();
    let mut rows: Vec<usize> = (0..n).collect();
    rows.sort_by(|&a, &b| row_best[b].1.total_cmp(&row_best[a].1).then(a.cmp(&b)));
    let mut taken = vec![false; n];
    let mut assignment = vec![usize::MAX; n];
    for i in rows {
        let j = if !taken[row_best[i].0] {
            row_best[i].0
        } else {
            (0..n)
                .filter(|&j| !taken[j])
                .map(|j| (j, score(i, j)))
                .fold((usize::MAX, f64::NEG_INFINITY), |a, b| if b.1 > a.1 || a.0 == usize::MAX { b } else { a })
                .0
        };
        taken[j] = true;
        assignment[i] = j;
    }
    assignment
}
