//! Principal component analysis by exact one-sided Jacobi SVD.
//!
//! The data are always mean-centered. Component signs are fixed so that
//! the entry of largest magnitude in each component is non-negative (the
//! first such entry wins ties), which keeps "largest projection" and
//! "smallest projection" from swapping between runs.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const MAX_SWEEPS: usize = 80;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// One unit-norm principal direction per row, `n x M`.
    pub components: Matrix,
    /// Sample variance along each component, non-increasing.
    pub explained_variance: Vec<f64>,
}

/// Data projected onto the principal components, `N x n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaProjection(pub Matrix);

impl PcaProjection {
    pub fn values(&self) -> &Matrix {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.rows()
    }

    pub fn cols(&self) -> usize {
        self.0.cols()
    }
}

impl From<Matrix> for PcaProjection {
    fn from(m: Matrix) -> Self {
        Self(m)
    }
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.components.rows()
    }

    pub fn project(&self, x: &Matrix) -> Result<PcaProjection> {
        let m = self.mean.len();
        if x.cols() != m {
            return Err(Error::DimensionMismatch { expected: m, got: x.cols() });
        }
        let k = self.n_components();
        let mut out = Matrix::zeros(x.rows(), k);
        let mut centered = vec![0.0; m];
        for i in 0..x.rows() {
            for ((c, v), mu) in centered.iter_mut().zip(x.row(i)).zip(&self.mean) {
                *c = v - mu;
            }
            for j in 0..k {
                out.set(i, j, dot(&centered, self.components.row(j)));
            }
        }
        Ok(PcaProjection(out))
    }

    /// Maps projections back to the embedding space.
    pub fn reconstruct(&self, p: &PcaProjection) -> Matrix {
        let m = self.mean.len();
        let mut out = Matrix::zeros(p.rows(), m);
        for i in 0..p.rows() {
            let row = out.row_mut(i);
            row.copy_from_slice(&self.mean);
            for j in 0..self.n_components() {
                let w = p.0.get(i, j);
                for (o, c) in row.iter_mut().zip(self.components.row(j)) {
                    *o += w * c;
                }
            }
        }
        out
    }
}

pub fn fit(x: &Matrix, n: usize) -> Result<PcaModel> {
    let (rows, cols) = (x.rows(), x.cols());
    if rows < 2 {
        return Err(Error::TooFewRows { needed: 2, got: rows });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("number of components must be positive".into()));
    }
    let max = rows.min(cols);
    if n > max {
        return Err(Error::TooManyComponents { requested: n, max });
    }
    x.check_finite()?;

    let mean: Vec<f64> = (0..cols)
        .map(|j| x.iter_rows().map(|r| r[j]).sum::<f64>() / rows as f64)
        .collect();

    let (sigma, directions) = if rows >= cols {
        // Orthogonalize the M columns of the centered matrix; V holds the
        // right singular vectors.
        let columns: Vec<Vec<f64>> =
            (0..cols).map(|j| x.iter_rows().map(|r| r[j] - mean[j]).collect()).collect();
        let (rotated, v) = one_sided_jacobi(columns);
        let sigma: Vec<f64> = rotated.iter().map(|c| norm(c)).collect();
        (sigma, v)
    } else {
        // Wide case: orthogonalize the N rows instead; the normalized
        // results are the right singular vectors directly.
        let columns: Vec<Vec<f64>> =
            x.iter_rows().map(|r| r.iter().zip(&mean).map(|(v, m)| v - m).collect()).collect();
        let (rotated, _) = one_sided_jacobi(columns);
        let sigma: Vec<f64> = rotated.iter().map(|c| norm(c)).collect();
        (sigma, rotated)
    };

    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap_or(core::cmp::Ordering::Equal));

    let largest = sigma.iter().cloned().fold(0.0, f64::max);
    let tiny = largest * f64::EPSILON * (rows.max(cols) as f64);
    let mut components: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut explained_variance = Vec::with_capacity(n);
    for &idx in order.iter().take(n) {
        let s = sigma[idx];
        let mut dir = if s > tiny && s > 0.0 {
            let mut d = directions[idx].clone();
            let len = norm(&d);
            d.iter_mut().for_each(|v| *v /= len);
            Some(d)
        } else {
            None
        };
        if dir.is_none() {
            dir = Some(complete_basis(&components, cols));
        }
        let mut d = dir.unwrap_or_default();
        fix_sign(&mut d);
        components.push(d);
        explained_variance.push(if s > tiny { s * s / (rows - 1) as f64 } else { 0.0 });
    }

    let flat: Vec<f64> = components.into_iter().flatten().collect();
    Ok(PcaModel { mean, components: Matrix::from_vec(n, cols, flat)?, explained_variance })
}

/// Fits `n` components and projects the training data in one step.
pub fn fit_project(x: &Matrix, n: usize) -> Result<(PcaModel, PcaProjection)> {
    let model = fit(x, n)?;
    let p = model.project(x)?;
    Ok((model, p))
}

/// Maximum absolute entry of each row.
pub fn row_infinity_norms(p: &Matrix) -> Vec<f64> {
    p.iter_rows().map(|r| r.iter().fold(0.0f64, |acc, v| acc.max(libm::fabs(*v)))).collect()
}

/// Flips `v` so its largest-magnitude entry (lowest index on ties) is non-negative.
pub fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if libm::fabs(*x) > libm::fabs(v[best]) {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Repeatedly rotates column pairs until all are mutually orthogonal.
/// Returns the rotated columns and the accumulated rotation (`k x k`,
/// stored as columns).
fn one_sided_jacobi(mut cols: Vec<Vec<f64>>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let k = cols.len();
    let mut v: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let mut e = vec![0.0; k];
            e[j] = 1.0;
            e
        })
        .collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || libm::fabs(gamma) <= f64::EPSILON * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = libm::copysign(1.0, zeta) / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    (cols, v)
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    for (a, b) in left[p].iter_mut().zip(right[0].iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// A unit vector orthogonal to all of `basis`, built from the first
/// standard basis vector that survives Gram-Schmidt.
fn complete_basis(basis: &[Vec<f64>], dim: usize) -> Vec<f64> {
    for e in 0..dim {
        let mut cand = vec![0.0; dim];
        cand[e] = 1.0;
        for _ in 0..2 {
            for b in basis {
                let proj = dot(&cand, b);
                cand.iter_mut().zip(b).for_each(|(c, bv)| *c -= proj * bv);
            }
        }
        let len = norm(&cand);
        if len > 1e-6 {
            cand.iter_mut().for_each(|c| *c /= len);
            return cand;
        }
    }
    vec![0.0; dim]
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}
