//! Data sets, synthetic generators and fidelity (labeled subset) sampling.

mod features;
mod synth;

pub use features::{patch_features, ImageBuffer};
pub use synth::{swiss_roll, three_moons, three_moons_with_noise};

use alloc::format;
use alloc::vec::Vec;

use crate::model::{FidelityPoint, FidelitySet};
use crate::rng::Rng;
use crate::{Error, Result};

/// A feature matrix with an optional ground-truth labeling.
///
/// Points are stored row-major: point `i` occupies
/// `points[i * dim .. (i + 1) * dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<f64>,
    len: usize,
    dim: usize,
    labels: Option<Vec<usize>>,
    num_classes: usize,
}

impl Dataset {
    /// Unlabeled data set. Validates shape and finiteness.
    pub fn new(points: Vec<f64>, len: usize, dim: usize) -> Result<Self> {
        Self::build(points, len, dim, None, 0)
    }

    /// Labeled data set; `num_classes` must cover every label and every
    /// class in `[0, num_classes)` must occur at least once.
    pub fn with_labels(
        points: Vec<f64>,
        len: usize,
        dim: usize,
        labels: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self> {
        Self::build(points, len, dim, Some(labels), num_classes)
    }

    fn build(
        points: Vec<f64>,
        len: usize,
        dim: usize,
        labels: Option<Vec<usize>>,
        num_classes: usize,
    ) -> Result<Self> {
        if len < 2 || dim < 1 {
            return Err(Error::InvalidData(format!(
                "need at least 2 points of dimension >= 1, got {len} x {dim}"
            )));
        }
        if points.len() != len * dim {
            return Err(Error::SizeMismatch {
                expected: len * dim,
                got: points.len(),
            });
        }
        if let Some(bad) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite feature value at flat index {bad}"
            )));
        }
        if let Some(labels) = &labels {
            if labels.len() != len {
                return Err(Error::SizeMismatch {
                    expected: len,
                    got: labels.len(),
                });
            }
            if num_classes < 2 {
                return Err(Error::InvalidData(format!(
                    "need at least 2 classes, got {num_classes}"
                )));
            }
            let mut seen = alloc::vec![false; num_classes];
            for (i, &label) in labels.iter().enumerate() {
                if label >= num_classes {
                    return Err(Error::InvalidData(format!(
                        "label {label} at point {i} is outside [0, {num_classes})"
                    )));
                }
                seen[label] = true;
            }
            if let Some(missing) = seen.iter().position(|s| !s) {
                return Err(Error::InvalidData(format!(
                    "class {missing} has no points"
                )));
            }
        }
        Ok(Dataset {
            points,
            len,
            dim,
            labels,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of classes, 0 when unlabeled.
    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Restriction to `indices` (in the given order), keeping labels.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut points = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            points.extend_from_slice(self.point(i));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i]).collect::<Vec<_>>());
        Self::build(points, indices.len(), self.dim, labels, self.num_classes)
    }

    /// Seeded stratified subsample with `per_class` points from each class.
    ///
    /// Selected indices are returned in ascending original order.
    pub fn stratified_subsample(&self, per_class: usize, seed: u64) -> Result<Self> {
        let labels = self
            .labels
            .as_ref()
            .ok_or_else(|| Error::InvalidData("stratified subsample needs labels".into()))?;
        let mut rng = Rng::new(seed);
        let mut chosen = Vec::with_capacity(per_class * self.num_classes);
        for class in 0..self.num_classes {
            let members: Vec<usize> = (0..self.len).filter(|&i| labels[i] == class).collect();
            if members.len() < per_class {
                return Err(Error::InvalidConfig(format!(
                    "class {class} has {} points, cannot sample {per_class}",
                    members.len()
                )));
            }
            for pick in rng.sample_distinct(members.len(), per_class) {
                chosen.push(members[pick]);
            }
        }
        chosen.sort_unstable();
        self.subset(&chosen)
    }
}

/// How to pick the labeled (fidelity) subset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FidelityMode {
    /// The same number of points from every class.
    PerClassCount(usize),
    /// `floor(f * n)` points sampled from the whole set; class balance is
    /// not enforced.
    Fraction(f64),
}

/// Fidelity sampling plan: mode plus its own seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelitySpec {
    pub mode: FidelityMode,
    pub seed: u64,
}

impl FidelitySpec {
    pub fn per_class(count: usize, seed: u64) -> Self {
        FidelitySpec {
            mode: FidelityMode::PerClassCount(count),
            seed,
        }
    }

    pub fn fraction(f: f64, seed: u64) -> Self {
        FidelitySpec {
            mode: FidelityMode::Fraction(f),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        match self.mode {
            FidelityMode::PerClassCount(c) if c >= 1 => Ok(()),
            FidelityMode::Fraction(f) if f > 0.0 && f <= 1.0 => Ok(()),
            _ => Err(Error::InvalidConfig(
                "fidelity: need count >= 1 or fraction in (0, 1]".into(),
            )),
        }
    }
}

/// Samples the labeled anchor set from ground-truth `labels`.
///
/// Every selected vertex gets weight `mu`. Entries come out sorted by
/// vertex index.
pub fn sample_fidelity(
    labels: &[usize],
    num_classes: usize,
    spec: &FidelitySpec,
    mu: f64,
) -> Result<FidelitySet> {
    spec.validate()?;
    if mu <= 0.0 || !mu.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "fidelity weight must be positive and finite, got {mu}"
        )));
    }
    let n = labels.len();
    let mut rng = Rng::new(spec.seed);
    let mut entries = Vec::new();
    match spec.mode {
        FidelityMode::PerClassCount(count) => {
            for class in 0..num_classes {
                let members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
                if members.len() < count {
                    return Err(Error::InvalidConfig(format!(
                        "class {class} has {} points, cannot label {count}",
                        members.len()
                    )));
                }
                for pick in rng.sample_distinct(members.len(), count) {
                    let vertex = members[pick];
                    entries.push(FidelityPoint {
                        vertex,
                        class,
                        weight: mu,
                    });
                }
            }
        }
        FidelityMode::Fraction(f) => {
            let count = (f * n as f64) as usize;
            for vertex in rng.sample_distinct(n, count) {
                entries.push(FidelityPoint {
                    vertex,
                    class: labels[vertex],
                    weight: mu,
                });
            }
        }
    }
    entries.sort_unstable_by_key(|e| e.vertex);
    Ok(FidelitySet { entries })
}
