//! Cluster-to-class alignment for scoring unsupervised baselines.
//!
//! Cluster ids carry no meaning, so accuracy is computed after choosing the
//! label permutation that maximizes agreement with the ground truth. The
//! optimum is found by the Hungarian method on the contingency table, then
//! refined to the lexicographically smallest permutation among optima so
//! ties resolve deterministically.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Optimal assignment (minimum total cost) on a square integer matrix.
/// Returns (total cost, column assigned to each row).
fn hungarian(cost: &[i64], k: usize) -> (i64, Vec<usize>) {
    const INF: i64 = i64::MAX / 4;
    // potentials and matching over 1-based columns, column 0 is virtual
    let mut u = alloc::vec![0i64; k + 1];
    let mut v = alloc::vec![0i64; k + 1];
    let mut matched_row = alloc::vec![0usize; k + 1];
    let mut way = alloc::vec![0usize; k + 1];
    for i in 1..=k {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = alloc::vec![INF; k + 1];
        let mut used = alloc::vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = INF;
            let mut j1 = 0usize;
            for j in 1..=k {
                if !used[j] {
                    let cur = cost[(i0 - 1) * k + (j - 1)] - u[i0] - v[j];
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
            for j in 0..=k {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = alloc::vec![0usize; k];
    let mut total = 0i64;
    for j in 1..=k {
        let row = matched_row[j];
        if row > 0 {
            assignment[row - 1] = j - 1;
            total += cost[(row - 1) * k + (j - 1)];
        }
    }
    (total, assignment)
}

/// Minimum assignment cost over a subproblem: rows `rows`, columns `cols`.
fn sub_optimum(cost: &[i64], k: usize, rows: &[usize], cols: &[usize]) -> i64 {
    let m = rows.len();
    if m == 0 {
        return 0;
    }
    let mut sub = alloc::vec![0i64; m * m];
    for (a, &r) in rows.iter().enumerate() {
        for (b, &c) in cols.iter().enumerate() {
            sub[a * m + b] = cost[r * k + c];
        }
    }
    hungarian(&sub, m).0
}

/// The permutation `perm` (cluster id -> class) maximizing the number of
/// points where `perm[pred[i]] == truth[i]`; ties resolve to the
/// lexicographically smallest permutation.
pub fn align_labels(pred: &[usize], truth: &[usize], k: usize) -> Result<Vec<usize>> {
    if pred.len() != truth.len() {
        return Err(Error::SizeMismatch {
            expected: truth.len(),
            got: pred.len(),
        });
    }
    if k == 0 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    let mut contingency = alloc::vec![0i64; k * k];
    for (&p, &t) in pred.iter().zip(truth) {
        if p >= k || t >= k {
            return Err(Error::InvalidData(alloc::format!(
                "label out of range: pred {p}, truth {t}, k {k}"
            )));
        }
        contingency[p * k + t] += 1;
    }
    // maximize matches == minimize negated counts
    let cost: Vec<i64> = contingency.iter().map(|&c| -c).collect();
    let (best, _) = hungarian(&cost, k);

    // fix rows one by one to the smallest class that still reaches `best`
    let mut perm = alloc::vec![0usize; k];
    let mut used = alloc::vec![false; k];
    let mut fixed_cost = 0i64;
    for row in 0..k {
        let tail_rows: Vec<usize> = ((row + 1)..k).collect();
        for class in 0..k {
            if used[class] {
                continue;
            }
            let tail_cols: Vec<usize> = (0..k).filter(|&c| !used[c] && c != class).collect();
            let candidate = fixed_cost + cost[row * k + class]
                + sub_optimum(&cost, k, &tail_rows, &tail_cols);
            if candidate == best {
                perm[row] = class;
                used[class] = true;
                fixed_cost += cost[row * k + class];
                break;
            }
        }
    }
    debug_assert_eq!(fixed_cost, best);
    Ok(perm)
}

/// Accuracy after aligning cluster ids to classes.
pub fn aligned_accuracy(pred: &[usize], truth: &[usize], k: usize) -> Result<f64> {
    let perm = align_labels(pred, truth, k)?;
    let matches = pred
        .iter()
        .zip(truth)
        .filter(|&(&p, &t)| perm[p] == t)
        .count();
    Ok(matches as f64 / truth.len() as f64)
}

/// Applies an alignment permutation to cluster ids.
pub fn apply_alignment(pred: &[usize], perm: &[usize]) -> Vec<usize> {
    pred.iter().map(|&p| perm[p]).collect()
}
