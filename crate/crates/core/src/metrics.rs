//! Scoring and multi-run aggregation.

use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Fraction of points where `pred == truth` (whole set, labeled anchors
/// included).
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::SizeMismatch {
            expected: truth.len(),
            got: pred.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::InvalidData("empty prediction".into()));
    }
    let hits = pred.iter().zip(truth).filter(|&(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// `k x k` count matrix, row = truth class, column = predicted class.
pub fn confusion(pred: &[usize], truth: &[usize], k: usize) -> Result<Vec<u64>> {
    if pred.len() != truth.len() {
        return Err(Error::SizeMismatch {
            expected: truth.len(),
            got: pred.len(),
        });
    }
    let mut matrix = alloc::vec![0u64; k * k];
    for (&p, &t) in pred.iter().zip(truth) {
        if p >= k || t >= k {
            return Err(Error::InvalidData(alloc::format!(
                "label out of range: pred {p}, truth {t}, k {k}"
            )));
        }
        matrix[t * k + p] += 1;
    }
    Ok(matrix)
}

/// Aggregated scores over repeated runs.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub runs: usize,
    pub mean_accuracy: f64,
    /// Sample standard deviation over runs (0 for a single run).
    pub stddev: f64,
    pub mean_runtime_s: f64,
    /// Mean confusion counts over runs, row = truth class.
    pub confusion: Vec<f64>,
    pub num_classes: usize,
}

/// Mean / sample-stddev of accuracies, mean runtime, mean confusion.
pub fn aggregate(
    accuracies: &[f64],
    runtimes: &[f64],
    confusions: &[Vec<u64>],
    num_classes: usize,
) -> Result<EvalReport> {
    let runs = accuracies.len();
    if runs == 0 {
        return Err(Error::InvalidData("no runs to aggregate".into()));
    }
    if runtimes.len() != runs {
        return Err(Error::SizeMismatch {
            expected: runs,
            got: runtimes.len(),
        });
    }
    let mean_accuracy = accuracies.iter().sum::<f64>() / runs as f64;
    let stddev = if runs > 1 {
        let ss: f64 = accuracies
            .iter()
            .map(|a| (a - mean_accuracy) * (a - mean_accuracy))
            .sum();
        math::sqrt(ss / (runs - 1) as f64)
    } else {
        0.0
    };
    let mean_runtime_s = runtimes.iter().sum::<f64>() / runs as f64;

    let mut confusion = alloc::vec![0.0f64; num_classes * num_classes];
    if !confusions.is_empty() {
        for c in confusions {
            if c.len() != confusion.len() {
                return Err(Error::SizeMismatch {
                    expected: confusion.len(),
                    got: c.len(),
                });
            }
            for (acc, &v) in confusion.iter_mut().zip(c) {
                *acc += v as f64;
            }
        }
        let inv = 1.0 / confusions.len() as f64;
        confusion.iter_mut().for_each(|v| *v *= inv);
    }

    Ok(EvalReport {
        runs,
        mean_accuracy,
        stddev,
        mean_runtime_s,
        confusion,
        num_classes,
    })
}
