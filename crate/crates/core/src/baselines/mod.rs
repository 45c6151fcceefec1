//! Reference clustering methods and their scoring utilities.

mod align;
mod eigen;
mod kmeans;

pub use align::{align_labels, aligned_accuracy, apply_alignment};
pub use eigen::{
    dense_symmetric_eigen, smallest_eigenpairs, tridiagonal_eigen, DenseSym, EigenOptions,
    EigenPairs, SymLaplacian, SymmetricOp,
};
pub use kmeans::{kmeans, ClusterResult};

use alloc::vec::Vec;

use crate::graph::SimilarityGraph;
use crate::Result;

/// Spectral clustering: k-means on the rows of the `n_eigenvectors`
/// smallest eigenvectors of the symmetric normalized Laplacian.
///
/// The embedding rows are used as-is (no row normalization, no dropped
/// trivial eigenvector).
pub fn spectral_clustering(
    graph: &SimilarityGraph,
    num_classes: usize,
    n_eigenvectors: usize,
    restarts: usize,
    seed: u64,
) -> Result<ClusterResult> {
    let embedding = spectral_embedding(graph, n_eigenvectors)?;
    kmeans(
        &embedding,
        graph.len(),
        n_eigenvectors,
        num_classes,
        restarts,
        seed,
    )
}

/// Rows of the smallest Laplacian eigenvectors: point `i` maps to
/// `(v_1[i], ..., v_m[i])`, row-major.
pub fn spectral_embedding(graph: &SimilarityGraph, n_eigenvectors: usize) -> Result<Vec<f64>> {
    let pairs = smallest_eigenpairs(
        &SymLaplacian(graph),
        n_eigenvectors,
        &EigenOptions::default(),
    )?;
    let n = graph.len();
    let mut embedding = alloc::vec![0.0; n * n_eigenvectors];
    for i in 0..n {
        for q in 0..n_eigenvectors {
            embedding[i * n_eigenvectors + q] = pairs.vector(q)[i];
        }
    }
    Ok(embedding)
}
