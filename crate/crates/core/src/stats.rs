//! Pearson correlation maps and boxplot statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::{FeatureVector, LabelKind, LabelVector, FEATURE_NAMES};

/// Product-moment correlation coefficient.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "correlation needs at least 2 points, got {}",
            x.len()
        )));
    }
    let n = T::from_usize_lossy(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if !(sxx > T::zero()) {
        return Err(Error::ZeroVariance("first correlation input".into()));
    }
    if !(syy > T::zero()) {
        return Err(Error::ZeroVariance("second correlation input".into()));
    }
    // rounding can push |r| a hair past 1
    Ok((sxy / (sxx * syy).sqrt()).max(-T::one()).min(T::one()))
}

/// Symmetric matrix of pairwise correlations between named variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMap {
    pub variables: Vec<String>,
    /// Row-major, `variables.len()` squared entries.
    pub matrix: Vec<Vec<f64>>,
}

impl CorrelationMap {
    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Coefficient between two named variables.
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.matrix[self.index_of(a)?][self.index_of(b)?])
    }
}

/// Correlation matrix over named columns of equal length.
pub fn correlation_matrix(columns: &[(String, Vec<f64>)]) -> Result<CorrelationMap> {
    let d = columns.len();
    if let Some((name, col)) = columns.iter().find(|(_, c)| c.len() != columns[0].1.len()) {
        return Err(Error::InvalidParameter(format!(
            "column {name} has {} rows, expected {}",
            col.len(),
            columns[0].1.len()
        )));
    }
    for (name, col) in columns {
        if col.len() >= 2 && col.iter().all(|&v| v == col[0]) {
            return Err(Error::ZeroVariance(format!("column {name}")));
        }
    }
    let mut matrix = vec![vec![0.0; d]; d];
    for i in 0..d {
        matrix[i][i] = 1.0;
        for j in i + 1..d {
            let r = pearson(&columns[i].1, &columns[j].1).map_err(|e| match e {
                Error::ZeroVariance(_) => Error::ZeroVariance(format!(
                    "column {} or {}",
                    columns[i].0, columns[j].0
                )),
                other => other,
            })?;
            matrix[i][j] = r;
            matrix[j][i] = r;
        }
    }
    Ok(CorrelationMap {
        variables: columns.iter().map(|(n, _)| n.clone()).collect(),
        matrix,
    })
}

/// 12×12 map over `[pressure_pa, gc_type, symmetry, <nine features>]`, labels
/// encoded by their raw numeric values.
pub fn correlation_map(
    features: &[FeatureVector<f64>],
    labels: &[LabelVector],
) -> Result<CorrelationMap> {
    if features.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: features.len(),
        });
    }
    if features.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "correlation map needs at least 2 rows, got {}",
            features.len()
        )));
    }
    let mut columns: Vec<(String, Vec<f64>)> = LabelKind::ALL
        .iter()
        .map(|&k| {
            let col = labels.iter().map(|l| l.value(k) as f64).collect();
            (k.column_name().to_owned(), col)
        })
        .collect();
    for (j, name) in FEATURE_NAMES.iter().enumerate() {
        let col = features.iter().map(|f| f.to_array()[j]).collect();
        columns.push(((*name).to_owned(), col));
    }
    correlation_matrix(&columns)
}

/// Five-number summary with Tukey whiskers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotStats {
    pub group: String,
    pub n: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    /// Most extreme value within `1.5·IQR` below `q1`.
    pub whisker_low: f64,
    /// Most extreme value within `1.5·IQR` above `q3`.
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

/// Quantile of sorted data by linear interpolation between order statistics:
/// position `p·(n−1)` in zero-based index space.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0, "quantile of empty data");
    let h = p.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn boxplot_stats(values: &[f64], group: impl Into<String>) -> Result<BoxplotStats> {
    let group = group.into();
    if values.is_empty() {
        return Err(Error::InvalidParameter(format!("group {group:?} is empty")));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "group {group:?} has a non-finite value at index {i}"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let reach = 1.5 * (q3 - q1);
    let (lo_fence, hi_fence) = (q1 - reach, q3 + reach);
    let inside = || sorted.iter().copied().filter(|&v| v >= lo_fence && v <= hi_fence);
    // the quartiles lie inside the fences, so some data point always does too
    let whisker_low = inside().next().unwrap_or(q1);
    let whisker_high = inside().next_back().unwrap_or(q3);
    let outliers = sorted
        .iter()
        .copied()
        .filter(|&v| v < lo_fence || v > hi_fence)
        .collect();
    Ok(BoxplotStats {
        group,
        n: sorted.len(),
        median,
        q1,
        q3,
        whisker_low,
        whisker_high,
        outliers,
    })
}

/// Boxplot statistics of one feature per value of `kind`, groups in
/// ascending label order.
pub fn grouped_boxplots(
    features: &[FeatureVector<f64>],
    labels: &[LabelVector],
    feature: usize,
    kind: LabelKind,
) -> Result<Vec<BoxplotStats>> {
    if features.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: features.len(),
        });
    }
    if feature >= FEATURE_NAMES.len() {
        return Err(Error::InvalidParameter(format!("feature index {feature} out of range")));
    }
    let mut groups: Vec<i64> = labels.iter().map(|l| l.value(kind)).collect();
    groups.sort_unstable();
    groups.dedup();
    groups
        .into_iter()
        .map(|g| {
            let vals: Vec<f64> = features
                .iter()
                .zip(labels)
                .filter(|(_, l)| l.value(kind) == g)
                .map(|(f, _)| f.to_array()[feature])
                .collect();
            boxplot_stats(&vals, g.to_string())
        })
        .collect()
}
