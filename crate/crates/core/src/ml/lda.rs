//! Fisher linear discriminant analysis.
//!
//! The discriminant directions solve the generalised eigenproblem
//! `S_B w = λ S_W w` for between-class scatter `S_B = Σ_c n_c (m_c − m)(m_c − m)ᵀ`
//! and within-class scatter `S_W = Σ_c Σ_{i∈c} (x_i − m_c)(x_i − m_c)ᵀ`.
//! `S_W` is regularised with `λ·I`, `λ = 1e-6 · trace(S_W) / d`, factorised as
//! `L·Lᵀ`, and the symmetric problem `L⁻¹ S_B L⁻ᵀ u = λ u` is solved with
//! `w = L⁻ᵀ u`. Each direction is scaled to unit pooled within-class variance
//! and signed so that its largest-magnitude component is positive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::linalg::{cholesky, invert_lower, symmetric_eigen};
use crate::ml::{class_set, Matrix};
use crate::scalar::Scalar;

/// Relative ridge added to the within-class scatter.
pub const WITHIN_SCATTER_RIDGE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaProjection<T> {
    /// `d × out_dims`; the transform is `X · weights`.
    pub weights: Matrix<T>,
    /// All `d` generalised eigenvalues, descending.
    pub eigenvalues: Vec<T>,
    pub classes: Vec<i64>,
    /// Projected class means, one row per class in `classes` order.
    pub class_means: Matrix<T>,
}

impl<T: Scalar> LdaProjection<T> {
    pub fn in_dims(&self) -> usize {
        self.weights.rows()
    }

    pub fn out_dims(&self) -> usize {
        self.weights.cols()
    }

    pub fn transform(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        lda_transform(self, x)
    }

    /// Class whose projected mean is closest in Euclidean distance.
    pub fn nearest_mean(&self, z: &[T]) -> i64 {
        let mut best = (self.classes[0], T::infinity());
        for (c, m) in self.classes.iter().zip(self.class_means.iter_rows()) {
            let d: T = m.iter().zip(z).map(|(&a, &b)| (a - b) * (a - b)).sum();
            if d < best.1 {
                best = (*c, d);
            }
        }
        best.0
    }
}

pub fn lda_fit<T: Scalar>(x: &Matrix<T>, y: &[i64], out_dims: usize) -> Result<LdaProjection<T>> {
    let (n, d) = (x.rows(), x.cols());
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    let classes = class_set(y);
    let c = classes.len();
    if c < 2 {
        return Err(Error::SingleClass(c));
    }
    if n <= c {
        return Err(Error::InvalidParameter(format!(
            "LDA needs more samples ({n}) than classes ({c})"
        )));
    }
    if out_dims == 0 || out_dims > (c - 1).min(d) {
        return Err(Error::InvalidParameter(format!(
            "out_dims {out_dims} must lie in 1..={} for {c} classes and {d} features",
            (c - 1).min(d)
        )));
    }

    let nf = T::from_usize_lossy(n);
    let mean: Vec<T> = (0..d).map(|j| x.col(j).into_iter().sum::<T>() / nf).collect();
    let mut class_means = Matrix::zeros(c, d);
    let mut counts = vec![0usize; c];
    let class_index = |label: i64| classes.binary_search(&label).expect("label in class set");
    for (row, &label) in x.iter_rows().zip(y) {
        let k = class_index(label);
        counts[k] += 1;
        for (m, &v) in class_means.row_mut(k).iter_mut().zip(row) {
            *m = *m + v;
        }
    }
    for (k, &count) in counts.iter().enumerate() {
        let cnt = T::from_usize_lossy(count);
        class_means.row_mut(k).iter_mut().for_each(|m| *m = *m / cnt);
    }

    let mut sw = Matrix::zeros(d, d);
    for (row, &label) in x.iter_rows().zip(y) {
        let mk = class_means.row(class_index(label));
        for a in 0..d {
            let da = row[a] - mk[a];
            for b in 0..d {
                sw[(a, b)] = sw[(a, b)] + da * (row[b] - mk[b]);
            }
        }
    }
    let mut sb = Matrix::zeros(d, d);
    for (k, &count) in counts.iter().enumerate() {
        let nk = T::from_usize_lossy(count);
        let mk = class_means.row(k);
        for a in 0..d {
            for b in 0..d {
                sb[(a, b)] = sb[(a, b)] + nk * (mk[a] - mean[a]) * (mk[b] - mean[b]);
            }
        }
    }

    let ridge = T::lit(WITHIN_SCATTER_RIDGE) * sw.trace() / T::from_usize_lossy(d);
    if !(ridge > T::zero()) {
        return Err(Error::Degenerate("within-class scatter is zero".into()));
    }
    for a in 0..d {
        sw[(a, a)] = sw[(a, a)] + ridge;
    }
    let l = cholesky(&sw)?;
    let li = invert_lower(&l);
    let m = li.matmul(&sb)?.matmul(&li.transpose())?;
    // symmetrise against rounding before the eigensolver
    let mut ms = m.clone();
    for a in 0..d {
        for b in 0..d {
            ms[(a, b)] = (m[(a, b)] + m[(b, a)]) / T::lit(2.0);
        }
    }
    let (eigenvalues, u) = symmetric_eigen(&ms)?;
    let w_all = li.transpose().matmul(&u)?;

    let pooled = T::from_usize_lossy(n - c).sqrt();
    let mut weights = Matrix::zeros(d, out_dims);
    for k in 0..out_dims {
        let mut col = w_all.col(k);
        let pivot = col
            .iter()
            .copied()
            .fold(T::zero(), |best, v| if v.abs() > best.abs() { v } else { best });
        let sign = if pivot < T::zero() { -T::one() } else { T::one() };
        col.iter_mut().for_each(|v| *v = *v * sign * pooled);
        for (a, v) in col.into_iter().enumerate() {
            weights[(a, k)] = v;
        }
    }
    let class_means = class_means.matmul(&weights)?;
    Ok(LdaProjection {
        weights,
        eigenvalues,
        classes,
        class_means,
    })
}

/// `X · weights` (no centring).
pub fn lda_transform<T: Scalar>(proj: &LdaProjection<T>, x: &Matrix<T>) -> Result<Matrix<T>> {
    if x.cols() != proj.in_dims() {
        return Err(Error::DimensionMismatch {
            expected: proj.in_dims(),
            got: x.cols(),
        });
    }
    x.matmul(&proj.weights)
}
