//! Rasterised decision regions of low-dimensional classifiers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::{Matrix, SvmModel};
use crate::scalar::Scalar;

/// Fraction of the data range added on each side of the bounding box.
pub const GRID_MARGIN: f64 = 0.1;

/// Axis-aligned box, one interval per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Bounds {
    /// Tight bounding box of the rows of `points`.
    pub fn of<T: Scalar>(points: &Matrix<T>) -> Result<Self> {
        if points.rows() == 0 {
            return Err(Error::InvalidParameter("bounding box of no points".into()));
        }
        let mut min = vec![f64::INFINITY; points.cols()];
        let mut max = vec![f64::NEG_INFINITY; points.cols()];
        for r in points.iter_rows() {
            for (j, &v) in r.iter().enumerate() {
                let v = v.to_f64_lossy();
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Ok(Self { min, max })
    }

    /// Each interval widened by `fraction` of its length on both sides; a
    /// zero-length interval is widened by `fraction` absolute.
    pub fn expanded(&self, fraction: f64) -> Self {
        let (mut min, mut max) = (self.min.clone(), self.max.clone());
        for j in 0..min.len() {
            let pad = match max[j] - min[j] {
                r if r > 0.0 => fraction * r,
                _ => fraction,
            };
            min[j] -= pad;
            max[j] += pad;
        }
        Self { min, max }
    }
}

/// Predicted labels on a regular grid. `labels[iy * xs.len() + ix]` is the
/// class at `(xs[ix], ys[iy])`; a 1-D strip has an empty `ys` and one row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub labels: Vec<i64>,
}

impl DecisionGrid {
    pub fn at(&self, ix: usize, iy: usize) -> i64 {
        self.labels[iy * self.xs.len() + ix]
    }
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Classifies an `nx × ny` lattice spanning `bounds` expanded by
/// [`GRID_MARGIN`]. The model must take 2-D input.
pub fn decision_grid<T: Scalar>(
    model: &SvmModel<T>,
    bounds: &Bounds,
    nx: usize,
    ny: usize,
) -> Result<DecisionGrid> {
    if model.dims != 2 || bounds.min.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "decision grid needs a 2-D model, got {} dimensions",
            model.dims
        )));
    }
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid resolution must be at least 2 per axis, got {nx}×{ny}"
        )));
    }
    let b = bounds.expanded(GRID_MARGIN);
    let xs = axis(b.min[0], b.max[0], nx);
    let ys = axis(b.min[1], b.max[1], ny);
    let mut labels = Vec::with_capacity(nx * ny);
    for &y in &ys {
        for &x in &xs {
            labels.push(model.predict_one(&[T::lit(x), T::lit(y)])?);
        }
    }
    Ok(DecisionGrid { xs, ys, labels })
}

/// One-dimensional analogue of [`decision_grid`] for 1-D models.
pub fn decision_strip<T: Scalar>(model: &SvmModel<T>, bounds: &Bounds, n: usize) -> Result<DecisionGrid> {
    if model.dims != 1 || bounds.min.len() != 1 {
        return Err(Error::InvalidParameter(format!(
            "decision strip needs a 1-D model, got {} dimensions",
            model.dims
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "strip resolution must be at least 2, got {n}"
        )));
    }
    let b = bounds.expanded(GRID_MARGIN);
    let xs = axis(b.min[0], b.max[0], n);
    let labels = xs
        .iter()
        .map(|&x| model.predict_one(&[T::lit(x)]))
        .collect::<Result<_>>()?;
    Ok(DecisionGrid {
        xs,
        ys: vec![],
        labels,
    })
}
