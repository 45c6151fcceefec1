//! Multiclass semi-supervised segmentation on similarity graphs.
//!
//! Labels known on a small subset of points are propagated to the rest of a
//! data set by minimizing a diffuse-interface (Ginzburg-Landau style) energy
//! over a weighted kNN graph. The energy combines a graph smoothing term
//! built from a generalized class-difference measure, a periodic well
//! potential with minima at the integer class labels, and a quadratic
//! fidelity term anchoring the labeled points.
//!
//! The crate is `no_std` (with `alloc`) and fully deterministic: every
//! random quantity flows from an explicit seed, and all accumulations run
//! in a fixed order, so identical inputs give bit-identical outputs.
//!
//! Pipeline overview:
//!
//! ```text
//! points ──> graph::build_graph ──> SimilarityGraph
//!                                        │
//! labels ──> datasets::sample_fidelity ──┤
//!                                        ▼
//!                               solver::run ──> labels + RunTrace
//! ```
//!
//! Baselines (k-means on raw features, spectral clustering on the
//! normalized Laplacian) and scoring helpers live in [`baselines`] and
//! [`metrics`].

#![no_std]

extern crate alloc;

pub mod baselines;
pub mod datasets;
pub mod graph;
pub mod math;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod solver;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
