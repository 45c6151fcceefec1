//! Similarity graph construction: exact kNN, local scaling, union
//! symmetrization, degrees and Laplacian coefficients.
//!
//! Edge weights follow the local scaling rule
//! `w_ij = exp(-|x_i - x_j|^2 / (tau_i tau_j))` with `tau_i` the distance
//! from point `i` to its `M`-th nearest neighbor. The graph is stored in
//! CSR form together with per-edge normalized coefficients
//! `w_ij / sqrt(d_i d_j)` used by the smoothing term.
//!
//! Everything here is deterministic: ties in distance break by ascending
//! index and all accumulations run in fixed order, so the result does not
//! depend on how callers schedule the per-row work.

use alloc::format;
use alloc::vec::Vec;

use crate::datasets::Dataset;
use crate::math;
use crate::{Error, Result};

/// Guard against weights underflowing to zero for degenerate data.
const WEIGHT_FLOOR: f64 = 1e-300;

/// Parameters of the graph construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphConfig {
    /// Number of nearest neighbors per vertex.
    pub n_neighbors: usize,
    /// Index (1-based) of the neighbor that sets the local scale.
    pub scale_neighbor: usize,
    /// Lower bound on local scales (guards coincident points).
    pub tau_floor: f64,
    /// Lower bound on vertex degrees (guards isolated vertices).
    pub degree_floor: f64,
}

impl GraphConfig {
    pub fn new(n_neighbors: usize, scale_neighbor: usize) -> Self {
        GraphConfig {
            n_neighbors,
            scale_neighbor,
            tau_floor: 1e-8,
            degree_floor: 1e-12,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.n_neighbors >= n {
            return Err(Error::InvalidConfig(format!(
                "n_neighbors = {} must be < n = {n}",
                self.n_neighbors
            )));
        }
        if self.scale_neighbor == 0 || self.scale_neighbor > self.n_neighbors {
            return Err(Error::InvalidConfig(format!(
                "scale_neighbor = {} must be in [1, {}]",
                self.scale_neighbor, self.n_neighbors
            )));
        }
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.tau_floor) || !positive(self.degree_floor) {
            return Err(Error::InvalidConfig(
                "tau_floor and degree_floor must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A kNN hit: neighbor index and squared Euclidean distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub dist_sq: f64,
}

/// Squared Euclidean distance, accumulated over four fixed lanes so the
/// compiler can vectorize without changing the result between calls.
#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let base = c * 4;
        for lane in 0..4 {
            let d = a[base + lane] - b[base + lane];
            acc[lane] += d * d;
        }
    }
    let mut tail = 0.0;
    for i in chunks * 4..a.len() {
        let d = a[i] - b[i];
        tail += d * d;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// The `n_neighbors` nearest neighbors of point `i` (self excluded),
/// ascending by distance with ties broken by ascending index.
pub fn knn_row(data: &Dataset, i: usize, n_neighbors: usize) -> Vec<Neighbor> {
    let query = data.point(i);
    let mut candidates: Vec<Neighbor> = (0..data.len())
        .filter(|&j| j != i)
        .map(|j| Neighbor {
            index: j,
            dist_sq: dist_sq(query, data.point(j)),
        })
        .collect();
    candidates.sort_unstable_by(|a, b| {
        a.dist_sq
            .partial_cmp(&b.dist_sq)
            .expect("finite distances")
            .then(a.index.cmp(&b.index))
    });
    candidates.truncate(n_neighbors);
    candidates
}

/// Exact brute-force kNN for every point.
pub fn knn_search(data: &Dataset, n_neighbors: usize) -> Result<Vec<Vec<Neighbor>>> {
    if n_neighbors >= data.len() {
        return Err(Error::InvalidConfig(format!(
            "n_neighbors = {n_neighbors} must be < n = {}",
            data.len()
        )));
    }
    Ok((0..data.len())
        .map(|i| knn_row(data, i, n_neighbors))
        .collect())
}

/// Local scale per point: distance to the `scale_neighbor`-th closest
/// point, floored at `tau_floor`.
pub fn local_scales(knn: &[Vec<Neighbor>], scale_neighbor: usize, tau_floor: f64) -> Vec<f64> {
    knn.iter()
        .map(|row| {
            let tau = math::sqrt(row[scale_neighbor - 1].dist_sq);
            tau.max(tau_floor)
        })
        .collect()
}

/// Directed weighted edges `(i, j, w_ij)` for every kNN pair.
pub fn similarity_weights(
    knn: &[Vec<Neighbor>],
    scales: &[f64],
) -> Result<Vec<(usize, usize, f64)>> {
    let mut edges = Vec::with_capacity(knn.iter().map(|r| r.len()).sum());
    for (i, row) in knn.iter().enumerate() {
        for nb in row {
            if !nb.dist_sq.is_finite() {
                return Err(Error::InvalidData(format!(
                    "non-finite distance between points {i} and {}",
                    nb.index
                )));
            }
            let w = math::exp(-nb.dist_sq / (scales[i] * scales[nb.index]));
            edges.push((i, nb.index, w.max(WEIGHT_FLOOR)));
        }
    }
    Ok(edges)
}

/// Union symmetrization: an undirected edge `{i, j}` exists when either
/// directed kNN relation does. Returns canonical `(min, max, w)` entries
/// sorted by `(min, max)`; the weight formula is symmetric so duplicates
/// carry identical bits and collapse.
pub fn symmetrize(directed: &[(usize, usize, f64)]) -> Vec<(usize, usize, f64)> {
    let mut canonical: Vec<(usize, usize, f64)> = directed
        .iter()
        .filter(|&&(i, j, _)| i != j)
        .map(|&(i, j, w)| if i < j { (i, j, w) } else { (j, i, w) })
        .collect();
    canonical.sort_unstable_by_key(|&(i, j, _)| (i, j));
    canonical.dedup_by(|a, b| {
        if (a.0, a.1) == (b.0, b.1) {
            debug_assert_eq!(a.2.to_bits(), b.2.to_bits(), "asymmetric weight");
            true
        } else {
            false
        }
    });
    canonical
}

/// Sparse symmetric weighted graph with degrees and normalized
/// coefficients, in compressed sparse row layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    weights: Vec<f64>,
    norm_weights: Vec<f64>,
    degrees: Vec<f64>,
    floored_degrees: usize,
}

impl SimilarityGraph {
    /// Builds the CSR structure from canonical undirected edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)], degree_floor: f64) -> Result<Self> {
        let canonical = symmetrize(edges);
        let mut counts = alloc::vec![0usize; n];
        for &(i, j, w) in &canonical {
            if j >= n {
                return Err(Error::InvalidData(format!("edge ({i}, {j}) out of range")));
            }
            if !(w > 0.0 && w <= 1.0) {
                return Err(Error::InvalidData(format!(
                    "edge ({i}, {j}) has weight {w} outside (0, 1]"
                )));
            }
            counts[i] += 1;
            counts[j] += 1;
        }
        let mut row_offsets = alloc::vec![0usize; n + 1];
        for i in 0..n {
            row_offsets[i + 1] = row_offsets[i] + counts[i];
        }
        let nnz = row_offsets[n];
        let mut col_indices = alloc::vec![0usize; nnz];
        let mut weights = alloc::vec![0.0f64; nnz];
        let mut cursor = row_offsets[..n].to_vec();
        for &(i, j, w) in &canonical {
            col_indices[cursor[i]] = j;
            weights[cursor[i]] = w;
            cursor[i] += 1;
            col_indices[cursor[j]] = i;
            weights[cursor[j]] = w;
            cursor[j] += 1;
        }

        let mut degrees = alloc::vec![0.0f64; n];
        let mut floored = 0usize;
        for i in 0..n {
            let mut d = 0.0;
            for &w in &weights[row_offsets[i]..row_offsets[i + 1]] {
                d += w;
            }
            if d < degree_floor {
                d = degree_floor;
                floored += 1;
            }
            degrees[i] = d;
        }

        let mut norm_weights = alloc::vec![0.0f64; nnz];
        for i in 0..n {
            for e in row_offsets[i]..row_offsets[i + 1] {
                let j = col_indices[e];
                norm_weights[e] = weights[e] / math::sqrt(degrees[i] * degrees[j]);
            }
        }

        Ok(SimilarityGraph {
            n,
            row_offsets,
            col_indices,
            weights,
            norm_weights,
            degrees,
            floored_degrees: floored,
        })
    }

    /// Reassembles a graph from stored CSR arrays (e.g. a cache file).
    ///
    /// Degrees are taken as given; normalized coefficients are recomputed.
    pub fn from_parts(
        n: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        weights: Vec<f64>,
        degrees: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n + 1 || degrees.len() != n {
            return Err(Error::InvalidData("CSR arrays do not match n".into()));
        }
        let nnz = *row_offsets.last().unwrap();
        if col_indices.len() != nnz || weights.len() != nnz {
            return Err(Error::SizeMismatch {
                expected: nnz,
                got: col_indices.len().min(weights.len()),
            });
        }
        for i in 0..n {
            if row_offsets[i] > row_offsets[i + 1] {
                return Err(Error::InvalidData("row offsets not monotone".into()));
            }
        }
        let mut norm_weights = alloc::vec![0.0f64; nnz];
        for i in 0..n {
            for e in row_offsets[i]..row_offsets[i + 1] {
                let j = col_indices[e];
                if j >= n {
                    return Err(Error::InvalidData(format!("column {j} out of range")));
                }
                norm_weights[e] = weights[e] / math::sqrt(degrees[i] * degrees[j]);
            }
        }
        Ok(SimilarityGraph {
            n,
            row_offsets,
            col_indices,
            weights,
            norm_weights,
            degrees,
            floored_degrees: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edge_count(&self) -> usize {
        self.col_indices.len() / 2
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Vertices whose raw degree fell below the floor.
    pub fn floored_degree_count(&self) -> usize {
        self.floored_degrees
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn norm_weights(&self) -> &[f64] {
        &self.norm_weights
    }

    /// Neighbors of `i` as `(j, w_ij, w_ij / sqrt(d_i d_j))`, ascending in
    /// `j`.
    #[inline]
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        range.map(move |e| (self.col_indices[e], self.weights[e], self.norm_weights[e]))
    }

    /// Weight of edge `{i, j}` if present.
    pub fn weight_between(&self, i: usize, j: usize) -> Option<f64> {
        let row = &self.col_indices[self.row_offsets[i]..self.row_offsets[i + 1]];
        row.binary_search(&j)
            .ok()
            .map(|pos| self.weights[self.row_offsets[i] + pos])
    }

    /// Dense unnormalized Laplacian `L = D - W`, row-major. Intended for
    /// small graphs (tests, baselines).
    pub fn dense_laplacian(&self) -> Vec<f64> {
        let n = self.n;
        let mut matrix = alloc::vec![0.0f64; n * n];
        for i in 0..n {
            matrix[i * n + i] = self.degrees[i];
            for (j, w, _) in self.neighbors(i) {
                matrix[i * n + j] -= w;
            }
        }
        matrix
    }

    /// Dense symmetric normalized Laplacian
    /// `L_s = I - D^{-1/2} W D^{-1/2}`, row-major.
    pub fn dense_sym_laplacian(&self) -> Vec<f64> {
        let n = self.n;
        let mut matrix = alloc::vec![0.0f64; n * n];
        for i in 0..n {
            matrix[i * n + i] = 1.0;
            for (j, _, w_norm) in self.neighbors(i) {
                matrix[i * n + j] -= w_norm;
            }
        }
        matrix
    }

    /// `y = L_s x` without materializing the matrix.
    pub fn sym_laplacian_matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for (j, _, w_norm) in self.neighbors(i) {
                acc += w_norm * x[j];
            }
            y[i] = x[i] - acc;
        }
    }
}

/// Full pipeline from precomputed kNN lists (kNN may have been computed in
/// parallel by the caller; the result is identical to [`build_graph`]).
pub fn build_graph_from_knn(
    knn: &[Vec<Neighbor>],
    config: &GraphConfig,
) -> Result<SimilarityGraph> {
    config.validate(knn.len())?;
    let scales = local_scales(knn, config.scale_neighbor, config.tau_floor);
    let directed = similarity_weights(knn, &scales)?;
    SimilarityGraph::from_edges(knn.len(), &directed, config.degree_floor)
}

/// kNN search plus graph assembly.
pub fn build_graph(data: &Dataset, config: &GraphConfig) -> Result<SimilarityGraph> {
    config.validate(data.len())?;
    let knn = knn_search(data, config.n_neighbors)?;
    build_graph_from_knn(&knn, config)
}
