//! Soft-margin RBF support vector machines, one-versus-rest.
//!
//! Each binary machine solves the dual
//! `min ½ αᵀQα − eᵀα` s.t. `0 ≤ α_i ≤ C`, `yᵀα = 0`, `Q_ij = y_i y_j K(x_i, x_j)`
//! by sequential minimal optimisation with second-order working-set selection.
//! The decision function is `f(x) = Σ α_i y_i K(x_i, x) + b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::{class_set, Matrix};
use crate::scalar::Scalar;

pub const DEFAULT_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Training parameters. `gamma = None` selects `1 / (d · var(X))`, the
/// variance taken over all entries of the training matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c: f64,
    pub gamma: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            gamma: None,
            tol: DEFAULT_TOLERANCE,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// `exp(−γ‖a − b‖²)`.
pub fn rbf<T: Scalar>(a: &[T], b: &[T], gamma: T) -> T {
    let d2: T = a.iter().zip(b).map(|(&u, &v)| (u - v) * (u - v)).sum();
    (-gamma * d2).exp()
}

/// Kernel width used when none is given.
pub fn default_gamma<T: Scalar>(x: &Matrix<T>) -> T {
    let vals = x.as_slice();
    if vals.is_empty() || x.cols() == 0 {
        return T::one();
    }
    let n = T::from_usize_lossy(vals.len());
    let m = vals.iter().copied().sum::<T>() / n;
    let var = vals.iter().map(|&v| (v - m) * (v - m)).sum::<T>() / n;
    if var > T::zero() {
        T::one() / (T::from_usize_lossy(x.cols()) * var)
    } else {
        T::one()
    }
}

/// One target-versus-rest machine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryMachine<T> {
    /// The class scored as `+1`.
    pub class: i64,
    pub support_vectors: Matrix<T>,
    /// `α_i · y_i` per support vector.
    pub dual_coef: Vec<T>,
    pub bias: T,
    pub iterations: usize,
    /// Final maximal KKT violation.
    pub gap: T,
}

impl<T: Scalar> BinaryMachine<T> {
    pub fn decision(&self, x: &[T], gamma: T) -> T {
        self.support_vectors
            .iter_rows()
            .zip(&self.dual_coef)
            .map(|(sv, &a)| a * rbf(sv, x, gamma))
            .sum::<T>()
            + self.bias
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel<T> {
    /// Ascending class ids; one machine per class.
    pub classes: Vec<i64>,
    pub machines: Vec<BinaryMachine<T>>,
    pub gamma: T,
    pub c: T,
    pub dims: usize,
}

impl<T: Scalar> SvmModel<T> {
    /// Per-class decision values of one sample.
    pub fn decision_values(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims,
                got: x.len(),
            });
        }
        Ok(self.machines.iter().map(|m| m.decision(x, self.gamma)).collect())
    }

    pub fn predict_one(&self, x: &[T]) -> Result<i64> {
        let dv = self.decision_values(x)?;
        Ok(self.classes[argmax_lowest(&dv)])
    }

    pub fn predict(&self, x: &Matrix<T>) -> Result<Vec<i64>> {
        svm_predict(self, x)
    }
}

/// Index of the maximum; ties resolve to the lowest index.
fn argmax_lowest<T: Scalar>(v: &[T]) -> usize {
    let mut best = 0;
    for (i, &val) in v.iter().enumerate().skip(1) {
        if val > v[best] {
            best = i;
        }
    }
    best
}

pub fn svm_train<T: Scalar>(x: &Matrix<T>, y: &[i64], params: &SvmParams) -> Result<SvmModel<T>> {
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    let classes = class_set(y);
    if classes.len() < 2 {
        return Err(Error::SingleClass(classes.len()));
    }
    if !(params.c > 0.0) || !params.c.is_finite() {
        return Err(Error::InvalidParameter(format!("C must be positive, got {}", params.c)));
    }
    let gamma = match params.gamma {
        Some(g) if g > 0.0 && g.is_finite() => T::lit(g),
        Some(g) => {
            return Err(Error::InvalidParameter(format!("gamma must be positive, got {g}")))
        }
        None => default_gamma(x),
    };
    let c = T::lit(params.c);
    let n = x.rows();
    let mut kernel = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let k = rbf(x.row(i), x.row(j), gamma);
            kernel[(i, j)] = k;
            kernel[(j, i)] = k;
        }
    }
    let machines = classes
        .iter()
        .map(|&cls| {
            let yb: Vec<T> = y
                .iter()
                .map(|&l| if l == cls { T::one() } else { -T::one() })
                .collect();
            let sol = smo(&kernel, &yb, c, T::lit(params.tol), params.max_iter)?;
            let sv: Vec<usize> = (0..n).filter(|&i| sol.alpha[i] > T::zero()).collect();
            Ok(BinaryMachine {
                class: cls,
                support_vectors: x.select_rows(&sv),
                dual_coef: sv.iter().map(|&i| sol.alpha[i] * yb[i]).collect(),
                bias: -sol.rho,
                iterations: sol.iterations,
                gap: sol.gap,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SvmModel {
        classes,
        machines,
        gamma,
        c,
        dims: x.cols(),
    })
}

pub fn svm_predict<T: Scalar>(model: &SvmModel<T>, x: &Matrix<T>) -> Result<Vec<i64>> {
    x.iter_rows().map(|r| model.predict_one(r)).collect()
}

struct Solution<T> {
    alpha: Vec<T>,
    rho: T,
    iterations: usize,
    gap: T,
}

fn smo<T: Scalar>(k: &Matrix<T>, y: &[T], c: T, tol: T, max_iter: usize) -> Result<Solution<T>> {
    let n = y.len();
    let tau = T::lit(1e-12);
    let mut alpha = vec![T::zero(); n];
    // gradient of the dual objective: Qα − e
    let mut grad = vec![-T::one(); n];
    let pos = |i: usize| y[i] > T::zero();
    let in_up = |a: &[T], i: usize| (pos(i) && a[i] < c) || (!pos(i) && a[i] > T::zero());
    let in_low = |a: &[T], i: usize| (pos(i) && a[i] > T::zero()) || (!pos(i) && a[i] < c);

    let mut iterations = 0;
    let mut gap;
    loop {
        let mut g_max = T::neg_infinity();
        let mut i_sel = None;
        for t in 0..n {
            if in_up(&alpha, t) {
                let v = -y[t] * grad[t];
                if v >= g_max {
                    g_max = v;
                    i_sel = Some(t);
                }
            }
        }
        let mut g_max2 = T::neg_infinity();
        let mut j_sel = None;
        let mut obj_min = T::infinity();
        if let Some(i) = i_sel {
            for t in 0..n {
                if !in_low(&alpha, t) {
                    continue;
                }
                let yg = y[t] * grad[t];
                g_max2 = g_max2.max(yg);
                let b = g_max + yg;
                if b > T::zero() {
                    let mut a = k[(i, i)] + k[(t, t)] - T::lit(2.0) * k[(i, t)];
                    if a <= T::zero() {
                        a = tau;
                    }
                    let obj = -(b * b) / a;
                    if obj <= obj_min {
                        obj_min = obj;
                        j_sel = Some(t);
                    }
                }
            }
        }
        gap = g_max + g_max2;
        let (i, j) = match (i_sel, j_sel) {
            (Some(i), Some(j)) if gap >= tol => (i, j),
            _ => break,
        };
        if iterations >= max_iter {
            return Err(Error::NotConverged {
                iterations,
                gap: gap.to_f64_lossy(),
            });
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let mut quad = k[(i, i)] + k[(j, j)] - T::lit(2.0) * k[(i, j)];
        if quad <= T::zero() {
            quad = tau;
        }
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] = alpha[i] + delta;
            alpha[j] = alpha[j] + delta;
            if diff > T::zero() {
                if alpha[j] < T::zero() {
                    alpha[j] = T::zero();
                    alpha[i] = diff;
                }
            } else if alpha[i] < T::zero() {
                alpha[i] = T::zero();
                alpha[j] = -diff;
            }
            if diff > T::zero() {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] = alpha[i] - delta;
            alpha[j] = alpha[j] + delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < T::zero() {
                alpha[j] = T::zero();
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < T::zero() {
                alpha[i] = T::zero();
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] = grad[t] + y[t] * (y[i] * k[(t, i)] * di + y[j] * k[(t, j)] * dj);
        }
    }

    let mut ub = T::infinity();
    let mut lb = T::neg_infinity();
    let mut sum_free = T::zero();
    let mut n_free = 0usize;
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if pos(t) {
                lb = lb.max(yg);
            } else {
                ub = ub.min(yg);
            }
        } else if alpha[t] <= T::zero() {
            if pos(t) {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            sum_free = sum_free + yg;
            n_free += 1;
        }
    }
    let rho = if n_free > 0 {
        sum_free / T::from_usize_lossy(n_free)
    } else {
        (ub + lb) / T::lit(2.0)
    };
    Ok(Solution {
        alpha,
        rho,
        iterations,
        gap: gap.max(T::zero()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_is_shattered() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        let y = [0, 0, 1, 1];
        let params = SvmParams {
            gamma: Some(1.0),
            c: 10.0,
            ..Default::default()
        };
        let m = svm_train(&x, &y, &params).unwrap();
        assert_eq!(m.predict(&x).unwrap(), y.to_vec());
    }

    #[test]
    fn separable_two_class() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [0.2, 0.1], [-0.1, 0.3], [3.0, 3.0], [3.2, 2.9], [2.8, 3.1]])
            .unwrap();
        let y = [1, 1, 1, 2, 2, 2];
        let m = svm_train(&x, &y, &SvmParams::default()).unwrap();
        assert_eq!(m.predict(&x).unwrap(), y.to_vec());
        assert_eq!(m.classes, vec![1, 2]);
    }

    #[test]
    fn dual_feasibility() {
        let x: Matrix<f64> = Matrix::from_rows(&[[0.0, 0.0], [0.5, 0.4], [1.0, 1.0], [0.9, 0.1], [0.2, 0.8], [0.6, 0.6]])
            .unwrap();
        let y = [0, 1, 0, 1, 2, 2];
        let params = SvmParams {
            c: 0.5,
            ..Default::default()
        };
        let m = svm_train(&x, &y, &params).unwrap();
        for mach in &m.machines {
            let mut sum = 0.0f64;
            for &a in &mach.dual_coef {
                assert!(a.abs() <= 0.5 + 1e-12);
                sum += a;
            }
            assert!(sum.abs() <= params.tol, "{sum}");
            assert!(mach.gap < params.tol);
        }
    }

    #[test]
    fn single_class_and_dimension_errors() {
        let x = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        assert!(matches!(
            svm_train(&x, &[3, 3], &SvmParams::default()),
            Err(Error::SingleClass(1))
        ));
        let m = svm_train(&x, &[0, 1], &SvmParams::default()).unwrap();
        assert!(m.predict_one(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn ties_go_to_lowest_class() {
        assert_eq!(argmax_lowest(&[0.5, 0.5, 0.1]), 0);
        assert_eq!(argmax_lowest(&[0.1, 0.7, 0.7]), 1);
        let empty = Matrix::zeros(0, 1);
        let model = SvmModel {
            classes: vec![2, 5],
            machines: vec![
                BinaryMachine {
                    class: 2,
                    support_vectors: empty.clone(),
                    dual_coef: vec![],
                    bias: 0.0,
                    iterations: 0,
                    gap: 0.0,
                },
                BinaryMachine {
                    class: 5,
                    support_vectors: empty,
                    dual_coef: vec![],
                    bias: 0.0,
                    iterations: 0,
                    gap: 0.0,
                },
            ],
            gamma: 1.0,
            c: 1.0,
            dims: 1,
        };
        assert_eq!(model.predict_one(&[3.0]).unwrap(), 2);
    }

    #[test]
    fn isolated_support_vector_is_predicted_positive() {
        let x = Matrix::from_rows(&[[10.0, 10.0], [0.0, 0.0], [0.1, 0.0], [0.0, 0.1]]).unwrap();
        let y = [1, 0, 0, 0];
        let params = SvmParams {
            gamma: Some(0.5),
            c: 10.0,
            ..Default::default()
        };
        let m = svm_train(&x, &y, &params).unwrap();
        assert_eq!(m.predict_one(&[10.0, 10.0]).unwrap(), 1);
    }

    #[test]
    fn default_gamma_uses_overall_variance() {
        let x = Matrix::from_rows(&[[0.0, 2.0], [2.0, 0.0]]).unwrap();
        // entries 0,2,2,0: variance 1, d = 2
        assert_eq!(default_gamma(&x), 0.5);
    }
}
