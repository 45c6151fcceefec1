//! The multiclass diffuse-interface energy and its gradients.
//!
//! Vertex states are real scalars; the integer nearest to a state is its
//! class label, so class boundaries sit at half-integers. The energy has
//! three parts:
//!
//! * smoothing: `(eps/2) * sum_ij w_ij/sqrt(d_i d_j) * rho(u_i, u_j)^2`,
//!   where `rho` is a tree-distance-like difference that charges the same
//!   cost for any pair of distinct classes;
//! * potential: a periodic well `{u}^2 ({u} - 1)^2 / 2` with minima at the
//!   integers, scaled by `1/eps`;
//! * fidelity: `mu_i/2 (u_i - class_i)^2` on the labeled vertices.

use alloc::vec::Vec;

use crate::graph::SimilarityGraph;
use crate::math;
use crate::{Error, Result};

/// Margin keeping states strictly inside `(-1/2, K - 1/2)`.
const CLAMP_MARGIN: f64 = 1e-9;

/// Fractional part `x - floor(x)`, in `[0, 1)` (true floor, also for
/// negative `x`).
#[inline(always)]
pub fn fractional_part(x: f64) -> f64 {
    x - math::floor(x)
}

/// Periodic well potential `{x}^2 ({x} - 1)^2 / 2`, zero exactly at the
/// integers.
#[inline(always)]
pub fn well_potential(x: f64) -> f64 {
    let f = fractional_part(x);
    let g = f - 1.0;
    0.5 * f * f * g * g
}

/// Derivative of [`well_potential`]: `2{x}^3 - 3{x}^2 + {x}`.
#[inline(always)]
pub fn well_potential_deriv(x: f64) -> f64 {
    let f = fractional_part(x);
    f * (2.0 * f * f - 3.0 * f + 1.0)
}

/// Distance from `x` to the nearest half-integer, in `[0, 1/2]`.
#[inline(always)]
pub fn half_distance(x: f64) -> f64 {
    math::abs(0.5 - fractional_part(x))
}

/// Slope of [`half_distance`]: -1 below a half-integer, +1 above, 0 at the
/// two nonsmooth points ({x} = 0 and {x} = 1/2).
#[inline(always)]
pub fn half_distance_deriv(x: f64) -> f64 {
    let f = fractional_part(x);
    if f > 0.5 {
        1.0
    } else if f < 0.5 && f > 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Class label of state `x`: nearest integer, clamped into
/// `[0, num_classes)`.
#[inline(always)]
pub fn label_of(x: f64, num_classes: usize) -> usize {
    let y = math::floor(x + 0.5);
    if y < 0.0 {
        0
    } else if y >= num_classes as f64 {
        num_classes - 1
    } else {
        y as usize
    }
}

/// Generalized difference between two states.
///
/// Sum of the half-integer distances when the labels differ, absolute
/// difference when they agree. Symmetric, non-negative, zero on equal
/// states; it is not a metric (`rho = 0` does not force equality).
#[inline(always)]
pub fn generalized_difference(a: f64, b: f64, num_classes: usize) -> f64 {
    let ra = half_distance(a);
    let rb = half_distance(b);
    if label_of(a, num_classes) == label_of(b, num_classes) {
        math::abs(ra - rb)
    } else {
        ra + rb
    }
}

/// The evolving per-vertex scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    values: Vec<f64>,
    num_classes: usize,
}

impl StateVector {
    /// Wraps raw values, clamping each into the valid state interval.
    pub fn new(values: Vec<f64>, num_classes: usize) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::InvalidConfig(alloc::format!(
                "need at least 2 classes, got {num_classes}"
            )));
        }
        let mut state = StateVector {
            values,
            num_classes,
        };
        for i in 0..state.values.len() {
            let v = state.values[i];
            if !v.is_finite() {
                return Err(Error::Diverged { vertex: i });
            }
            state.values[i] = state.clamp(v);
        }
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Clamps into `[-1/2 + margin, K - 1/2 - margin]` so that labels always
    /// land in `[0, K)`.
    #[inline(always)]
    pub fn clamp(&self, x: f64) -> f64 {
        let (lo, hi) = self.clamp_bounds();
        x.max(lo).min(hi)
    }

    /// The closed interval states are clamped into.
    #[inline(always)]
    pub fn clamp_bounds(&self) -> (f64, f64) {
        (
            -0.5 + CLAMP_MARGIN,
            self.num_classes as f64 - 0.5 - CLAMP_MARGIN,
        )
    }

    pub fn label(&self, i: usize) -> usize {
        label_of(self.values[i], self.num_classes)
    }

    pub fn labels(&self) -> Vec<usize> {
        self.values
            .iter()
            .map(|&v| label_of(v, self.num_classes))
            .collect()
    }
}

/// One labeled anchor: vertex, class, fidelity weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityPoint {
    pub vertex: usize,
    pub class: usize,
    pub weight: f64,
}

/// The semi-supervised anchor set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FidelitySet {
    pub entries: Vec<FidelityPoint>,
}

impl FidelitySet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Checks indices, classes, weights and vertex distinctness.
    pub fn validate(&self, n: usize, num_classes: usize) -> Result<()> {
        let mut seen = alloc::vec![false; n];
        for e in &self.entries {
            if e.vertex >= n {
                return Err(Error::InvalidData(alloc::format!(
                    "fidelity vertex {} out of range (n = {n})",
                    e.vertex
                )));
            }
            if seen[e.vertex] {
                return Err(Error::InvalidData(alloc::format!(
                    "duplicate fidelity vertex {}",
                    e.vertex
                )));
            }
            seen[e.vertex] = true;
            if e.class >= num_classes {
                return Err(Error::InvalidData(alloc::format!(
                    "fidelity class {} out of range (K = {num_classes})",
                    e.class
                )));
            }
            if e.weight <= 0.0 || !e.weight.is_finite() {
                return Err(Error::InvalidData(alloc::format!(
                    "fidelity weight {} must be positive and finite",
                    e.weight
                )));
            }
        }
        Ok(())
    }

    /// Classes of `[0, num_classes)` with no anchor (callers may warn).
    pub fn missing_classes(&self, num_classes: usize) -> Vec<usize> {
        let mut present = alloc::vec![false; num_classes];
        for e in &self.entries {
            if e.class < num_classes {
                present[e.class] = true;
            }
        }
        (0..num_classes).filter(|&c| !present[c]).collect()
    }

    /// Dense per-vertex weight and target arrays for the solver loop.
    /// Unlabeled vertices get weight 0 (the target value is then unused).
    pub fn to_dense(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut weight = alloc::vec![0.0; n];
        let mut target = alloc::vec![0.0; n];
        for e in &self.entries {
            weight[e.vertex] = e.weight;
            target[e.vertex] = e.class as f64;
        }
        (weight, target)
    }
}

/// The three energy terms and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    pub smoothing: f64,
    pub potential: f64,
    pub fidelity: f64,
    pub total: f64,
}

/// Full energy of `state` at interface scale `eps`.
///
/// The smoothing sum runs over all ordered neighbor pairs (each undirected
/// edge contributes twice), matching a double sum over vertices in which
/// non-edges carry zero weight.
pub fn energy_breakdown(
    state: &StateVector,
    graph: &SimilarityGraph,
    fidelity: &FidelitySet,
    eps: f64,
) -> Result<EnergyBreakdown> {
    if state.len() != graph.len() {
        return Err(Error::SizeMismatch {
            expected: graph.len(),
            got: state.len(),
        });
    }
    let k = state.num_classes();
    let u = state.values();

    let mut smoothing = 0.0;
    let mut potential = 0.0;
    for i in 0..graph.len() {
        for (j, _w, w_norm) in graph.neighbors(i) {
            let rho = generalized_difference(u[i], u[j], k);
            smoothing += w_norm * rho * rho;
        }
        potential += well_potential(u[i]);
    }
    smoothing *= eps / 2.0;
    potential /= eps;

    let mut fid = 0.0;
    for e in &fidelity.entries {
        if e.vertex >= u.len() {
            return Err(Error::InvalidData(alloc::format!(
                "fidelity vertex {} out of range",
                e.vertex
            )));
        }
        let diff = u[e.vertex] - e.class as f64;
        fid += 0.5 * e.weight * diff * diff;
    }

    Ok(EnergyBreakdown {
        smoothing,
        potential,
        fidelity: fid,
        total: smoothing + potential + fid,
    })
}

/// Smoothing descent direction at vertex `i`:
/// `sum_j w^_ij [r(u_i) +- r(u_j)] r'(u_i)` with `+` across class
/// boundaries and a signed difference within a class.
///
/// The sign choice makes the expression proportional to the derivative of
/// the smoothing energy: `d/du_i (smoothing) = 2 eps * this`.
#[inline]
pub fn smoothing_gradient(state: &StateVector, graph: &SimilarityGraph, i: usize) -> f64 {
    let u = state.values();
    let k = state.num_classes();
    let r_i = half_distance(u[i]);
    let slope = half_distance_deriv(u[i]);
    if slope == 0.0 {
        return 0.0;
    }
    let label_i = label_of(u[i], k);
    let mut sum = 0.0;
    for (j, _w, w_norm) in graph.neighbors(i) {
        let r_j = half_distance(u[j]);
        let term = if label_of(u[j], k) == label_i {
            r_i - r_j
        } else {
            r_i + r_j
        };
        sum += w_norm * term;
    }
    sum * slope
}
