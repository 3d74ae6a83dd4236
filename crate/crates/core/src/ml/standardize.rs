use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::Matrix;
use crate::scalar::Scalar;

/// Column means and population standard deviations of a training matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer<T> {
    pub means: Vec<T>,
    pub stds: Vec<T>,
}

impl<T: Scalar> Standardizer<T> {
    /// Fails on an empty matrix or a constant column.
    pub fn fit(x: &Matrix<T>) -> Result<Self> {
        if x.rows() == 0 {
            return Err(Error::InvalidParameter("cannot standardize zero rows".into()));
        }
        let n = T::from_usize_lossy(x.rows());
        let mut means = Vec::with_capacity(x.cols());
        let mut stds = Vec::with_capacity(x.cols());
        for j in 0..x.cols() {
            let col = x.col(j);
            let m = col.iter().copied().sum::<T>() / n;
            let var = col.iter().map(|&v| (v - m) * (v - m)).sum::<T>() / n;
            // tolerate rounding noise on a column that is constant in exact arithmetic
            if !(var > T::epsilon() * T::epsilon() * m * m) || !(var > T::zero()) {
                return Err(Error::ZeroVariance(format!("column {j}")));
            }
            means.push(m);
            stds.push(var.sqrt());
        }
        Ok(Self { means, stds })
    }

    pub fn dims(&self) -> usize {
        self.means.len()
    }

    pub fn transform(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        if x.cols() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                got: x.cols(),
            });
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            for (j, v) in out.row_mut(i).iter_mut().enumerate() {
                *v = (*v - self.means[j]) / self.stds[j];
            }
        }
        Ok(out)
    }
}

/// Zero-mean, unit-variance columns plus the fitted parameters.
pub fn standardize<T: Scalar>(x: &Matrix<T>) -> Result<(Matrix<T>, Standardizer<T>)> {
    let s = Standardizer::fit(x)?;
    Ok((s.transform(x)?, s))
}
