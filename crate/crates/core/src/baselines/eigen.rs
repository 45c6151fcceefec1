//! Symmetric eigensolvers: a dense Householder + implicit-QL route for
//! small problems and a Lanczos route (full reorthogonalization) for the
//! sparse normalized Laplacian.
//!
//! Both routes return residual-verified eigenpairs sorted by ascending
//! eigenvalue, with a deterministic sign convention, so they can be checked
//! against each other.

use alloc::vec::Vec;

use crate::graph::SimilarityGraph;
use crate::math;
use crate::rng::Rng;
use crate::{Error, Result};

/// A symmetric linear operator.
pub trait SymmetricOp {
    fn dim(&self) -> usize;
    /// `y = A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// Row-major dense form (used by the dense route and as fallback).
    fn dense(&self) -> Vec<f64>;
}

/// The symmetric normalized Laplacian of a graph, applied matrix-free.
pub struct SymLaplacian<'a>(pub &'a SimilarityGraph);

impl SymmetricOp for SymLaplacian<'_> {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.sym_laplacian_matvec(x, y);
    }

    fn dense(&self) -> Vec<f64> {
        self.0.dense_sym_laplacian()
    }
}

/// A dense symmetric matrix (tests, ad-hoc problems).
pub struct DenseSym {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SymmetricOp for DenseSym {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, out) in y.iter_mut().enumerate().take(self.n) {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            *out = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn dense(&self) -> Vec<f64> {
        self.data.clone()
    }
}

/// Eigenpairs sorted by ascending eigenvalue; eigenvector `q` occupies
/// `vectors[q * n .. (q + 1) * n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub n: usize,
}

impl EigenPairs {
    pub fn vector(&self, q: usize) -> &[f64] {
        &self.vectors[q * self.n..(q + 1) * self.n]
    }
}

/// Options for [`smallest_eigenpairs`].
#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Required residual `|A v - lambda v| <= tol` for unit `v`.
    pub residual_tol: f64,
    /// At or below this dimension the dense route is used directly.
    pub dense_cutoff: usize,
    /// Largest dimension for which a dense fallback is attempted when the
    /// iterative route fails.
    pub dense_fallback_cap: usize,
    /// Seed of the Lanczos start vector.
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            residual_tol: 1e-8,
            dense_cutoff: 300,
            dense_fallback_cap: 5000,
            seed: 0x51_EE_D0,
        }
    }
}

/// The `k` smallest eigenpairs of a symmetric operator.
pub fn smallest_eigenpairs<O: SymmetricOp>(
    op: &O,
    k: usize,
    options: &EigenOptions,
) -> Result<EigenPairs> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidConfig(alloc::format!(
            "requested {k} eigenpairs of a {n}-dim operator"
        )));
    }
    if n <= options.dense_cutoff {
        return dense_smallest(op, k, options.residual_tol);
    }
    match lanczos_smallest(op, k, options) {
        Ok(pairs) => Ok(pairs),
        Err(err) if n <= options.dense_fallback_cap => {
            let _ = err;
            dense_smallest(op, k, options.residual_tol)
        }
        Err(err) => Err(err),
    }
}

fn dense_smallest<O: SymmetricOp>(op: &O, k: usize, tol: f64) -> Result<EigenPairs> {
    let n = op.dim();
    let matrix = op.dense();
    for i in 0..n {
        for j in (i + 1)..n {
            if math::abs(matrix[i * n + j] - matrix[j * n + i]) > 1e-10 {
                return Err(Error::InvalidData(alloc::format!(
                    "matrix not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let (values, vectors) = dense_symmetric_eigen(&matrix, n)?;
    let pairs = EigenPairs {
        values: values[..k].to_vec(),
        vectors: vectors[..k * n].to_vec(),
        n,
    };
    verify_residuals(op, &pairs, tol)?;
    Ok(pairs)
}

fn verify_residuals<O: SymmetricOp>(op: &O, pairs: &EigenPairs, tol: f64) -> Result<()> {
    let n = pairs.n;
    let mut y = alloc::vec![0.0; n];
    for (q, &lambda) in pairs.values.iter().enumerate() {
        let v = pairs.vector(q);
        op.apply(v, &mut y);
        let mut res_sq = 0.0;
        let mut norm_sq = 0.0;
        for i in 0..n {
            let r = y[i] - lambda * v[i];
            res_sq += r * r;
            norm_sq += v[i] * v[i];
        }
        let res = math::sqrt(res_sq);
        let norm = math::sqrt(norm_sq);
        if res > tol * norm.max(1e-300) {
            return Err(Error::EigenNonConvergence(alloc::format!(
                "pair {q}: residual {res:.3e} above {tol:.1e}"
            )));
        }
    }
    Ok(())
}

/// Full eigendecomposition of a dense symmetric matrix
/// (Householder tridiagonalization, then implicit-shift QL).
///
/// Returns eigenvalues ascending and eigenvectors row-per-pair.
pub fn dense_symmetric_eigen(matrix: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if matrix.len() != n * n {
        return Err(Error::SizeMismatch {
            expected: n * n,
            got: matrix.len(),
        });
    }
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut a = matrix.to_vec();
    let mut d = alloc::vec![0.0; n];
    let mut e = alloc::vec![0.0; n];
    if n == 1 {
        return Ok((alloc::vec![matrix[0]], alloc::vec![1.0]));
    }
    tred2(&mut a, n, &mut d, &mut e);
    tql2(&mut d, &mut e, n, &mut a)?;
    Ok(sort_and_orient(&d, &a, n))
}

/// Eigendecomposition of a symmetric tridiagonal matrix with diagonal
/// `diag` and subdiagonal `sub` (`sub.len() == diag.len() - 1`).
pub fn tridiagonal_eigen(diag: &[f64], sub: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if sub.len() + 1 != n {
        return Err(Error::SizeMismatch {
            expected: n - 1,
            got: sub.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = alloc::vec![0.0; n];
    e[1..].copy_from_slice(sub);
    let mut z = alloc::vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    if n > 1 {
        tql2(&mut d, &mut e, n, &mut z)?;
    }
    Ok(sort_and_orient(&d, &z, n))
}

/// Sorts pairs by ascending eigenvalue and flips each vector so that its
/// largest-magnitude component is positive.
fn sort_and_orient(d: &[f64], z: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| d[p].partial_cmp(&d[q]).expect("finite").then(p.cmp(&q)));
    let values: Vec<f64> = order.iter().map(|&j| d[j]).collect();
    let mut vectors = alloc::vec![0.0; n * n];
    for (q, &j) in order.iter().enumerate() {
        let row = &mut vectors[q * n..(q + 1) * n];
        for i in 0..n {
            row[i] = z[i * n + j];
        }
        let mut pivot = 0;
        for i in 1..n {
            if math::abs(row[i]) > math::abs(row[pivot]) {
                pivot = i;
            }
        }
        if row[pivot] < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
    }
    (values, vectors)
}

#[inline]
fn pythag(a: f64, b: f64) -> f64 {
    let (absa, absb) = (math::abs(a), math::abs(b));
    if absa > absb {
        let r = absb / absa;
        absa * math::sqrt(1.0 + r * r)
    } else if absb == 0.0 {
        0.0
    } else {
        let r = absa / absb;
        absb * math::sqrt(1.0 + r * r)
    }
}

#[inline]
fn sign_of(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        math::abs(a)
    } else {
        -math::abs(a)
    }
}

/// Householder reduction of a symmetric matrix to tridiagonal form,
/// accumulating the transformation in `a`.
fn tred2(a: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += math::abs(a[i * n + k]);
            }
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l];
                let g = if f >= 0.0 {
                    -math::sqrt(h)
                } else {
                    math::sqrt(h)
                };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    a[j * n + i] = a[i * n + j] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f_acc += e[j] * a[i * n + j];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += a[i * n + k] * a[k * n + j];
                }
                for k in 0..i {
                    a[k * n + j] -= g * a[k * n + i];
                }
            }
        }
        d[i] = a[i * n + i];
        a[i * n + i] = 1.0;
        for j in 0..i {
            a[j * n + i] = 0.0;
            a[i * n + j] = 0.0;
        }
    }
}

/// Implicit-shift QL iteration on a tridiagonal matrix; `z` accumulates the
/// eigenvectors (columns).
fn tql2(d: &mut [f64], e: &mut [f64], n: usize, z: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = math::abs(d[m]) + math::abs(d[m + 1]);
                if math::abs(e[m]) + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::EigenNonConvergence(alloc::format!(
                    "QL iteration stalled at block {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = pythag(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + sign_of(r, g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for ii in (l..m).rev() {
                let mut f = s * e[ii];
                let b = c * e[ii];
                r = pythag(f, g);
                e[ii + 1] = r;
                if r == 0.0 {
                    d[ii + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[ii + 1] - p;
                r = (d[ii] - g) * s + 2.0 * c * b;
                p = s * r;
                d[ii + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + ii + 1];
                    z[k * n + ii + 1] = s * z[k * n + ii] + c * f;
                    z[k * n + ii] = c * z[k * n + ii] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn norm(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

/// Lanczos with full reorthogonalization; Ritz pairs are residual-checked
/// and the Krylov dimension grows until the `k` smallest pairs converge.
fn lanczos_smallest<O: SymmetricOp>(
    op: &O,
    k: usize,
    options: &EigenOptions,
) -> Result<EigenPairs> {
    let n = op.dim();
    let cap = n.min(600);
    let mut m = (2 * k + 40).min(cap);
    loop {
        match lanczos_attempt(op, k, m, options) {
            Ok(pairs) => return Ok(pairs),
            Err(err) => {
                if m >= cap {
                    return Err(err);
                }
                m = (2 * m).min(cap);
            }
        }
    }
}

fn lanczos_attempt<O: SymmetricOp>(
    op: &O,
    k: usize,
    m: usize,
    options: &EigenOptions,
) -> Result<EigenPairs> {
    let n = op.dim();
    let mut rng = Rng::new(options.seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut alphas: Vec<f64> = Vec::with_capacity(m);
    let mut betas: Vec<f64> = Vec::with_capacity(m.saturating_sub(1));

    let mut v0: Vec<f64> = (0..n).map(|_| rng.range(-1.0, 1.0)).collect();
    let v0_norm = norm(&v0);
    for x in &mut v0 {
        *x /= v0_norm;
    }
    basis.push(v0);

    let mut w = alloc::vec![0.0; n];
    for j in 0..m {
        op.apply(&basis[j], &mut w);
        if j > 0 {
            let beta = betas[j - 1];
            let prev = &basis[j - 1];
            for i in 0..n {
                w[i] -= beta * prev[i];
            }
        }
        let alpha = dot(&w, &basis[j]);
        alphas.push(alpha);
        for i in 0..n {
            w[i] -= alpha * basis[j][i];
        }
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for v in &basis {
                let c = dot(&w, v);
                for i in 0..n {
                    w[i] -= c * v[i];
                }
            }
        }
        if j + 1 == m {
            break;
        }
        let beta = norm(&w);
        if beta > 1e-13 {
            betas.push(beta);
            basis.push(w.iter().map(|x| x / beta).collect());
        } else {
            // invariant subspace: continue from a fresh orthogonal direction
            let mut fresh;
            loop {
                fresh = (0..n).map(|_| rng.range(-1.0, 1.0)).collect::<Vec<f64>>();
                for _ in 0..2 {
                    for v in &basis {
                        let c = dot(&fresh, v);
                        for i in 0..n {
                            fresh[i] -= c * v[i];
                        }
                    }
                }
                let fresh_norm = norm(&fresh);
                if fresh_norm > 1e-8 {
                    for x in &mut fresh {
                        *x /= fresh_norm;
                    }
                    break;
                }
            }
            betas.push(0.0);
            basis.push(fresh);
        }
    }

    let steps = alphas.len();
    let (theta, s) = tridiagonal_eigen(&alphas, &betas[..steps - 1])?;
    if steps < k {
        return Err(Error::EigenNonConvergence("Krylov space too small".into()));
    }

    let mut values = Vec::with_capacity(k);
    let mut vectors = alloc::vec![0.0; k * n];
    for q in 0..k {
        values.push(theta[q]);
        let coeffs = &s[q * steps..(q + 1) * steps];
        let out = &mut vectors[q * n..(q + 1) * n];
        for (j, item) in basis.iter().enumerate().take(steps) {
            let c = coeffs[j];
            for i in 0..n {
                out[i] += c * item[i];
            }
        }
        let out_norm = norm(out);
        for x in out.iter_mut() {
            *x /= out_norm;
        }
        let mut pivot = 0;
        for i in 1..n {
            if math::abs(out[i]) > math::abs(out[pivot]) {
                pivot = i;
            }
        }
        if out[pivot] < 0.0 {
            for x in out.iter_mut() {
                *x = -*x;
            }
        }
    }
    let pairs = EigenPairs { values, vectors, n };
    verify_residuals(op, &pairs, options.residual_tol)?;
    Ok(pairs)
}
