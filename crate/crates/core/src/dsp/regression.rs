//! Least-squares line fitting.
//!
//! The slope uses the normal-equation form
//! `a = (N·Σxy − Σx·Σy) / (N·Σx² − (Σx)²)`. For equidistant integer abscissae
//! `x = 0..N` the sums `Σx = N(N−1)/2` and `Σx² = N(N−1)(2N−1)/6` are used in
//! closed form.

use num_traits::{FromPrimitive, Num};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
}

impl<T: Scalar> LineFit<T> {
    pub fn eval(&self, x: T) -> T {
        self.slope * x + self.intercept
    }
}

/// The sums entering the slope formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegressionSums<T> {
    pub n: T,
    pub sum_x: T,
    pub sum_y: T,
    pub sum_xy: T,
    pub sum_x2: T,
}

impl<T: Scalar> RegressionSums<T> {
    pub fn of(x: &[T], y: &[T]) -> Self {
        let mut s = Self {
            n: T::from_usize_lossy(x.len()),
            sum_x: T::zero(),
            sum_y: T::zero(),
            sum_xy: T::zero(),
            sum_x2: T::zero(),
        };
        for (&xi, &yi) in x.iter().zip(y) {
            s.sum_x = s.sum_x + xi;
            s.sum_y = s.sum_y + yi;
            s.sum_xy = s.sum_xy + xi * yi;
            s.sum_x2 = s.sum_x2 + xi * xi;
        }
        s
    }

    fn line(&self) -> Result<LineFit<T>> {
        let denom = self.n * self.sum_x2 - self.sum_x * self.sum_x;
        if !(denom > T::zero()) {
            return Err(Error::ZeroVariance("regression abscissa".into()));
        }
        let slope = (self.n * self.sum_xy - self.sum_x * self.sum_y) / denom;
        let intercept = (self.sum_y - slope * self.sum_x) / self.n;
        Ok(LineFit { slope, intercept })
    }
}

/// Closed-form `(Σx, Σx²)` for `x = 0, 1, …, n−1`.
///
/// Generic over any numeric type with exact integer arithmetic (`u64`, `i128`,
/// rationals) as well as floats.
pub fn equidistant_sums<N: Num + FromPrimitive + Copy>(n: u64) -> (N, N) {
    let nn = N::from_u64(n).expect("n representable");
    let one = N::one();
    let two = one + one;
    let six = two * (two + one);
    if n == 0 {
        return (N::zero(), N::zero());
    }
    let sum_x = nn * (nn - one) / two;
    let sum_x2 = nn * (nn - one) * (two * nn - one) / six;
    (sum_x, sum_x2)
}

/// Minimum mean-squared-error line through `(x, y)`.
pub fn fit_line<T: Scalar>(x: &[T], y: &[T]) -> Result<LineFit<T>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "line fit needs at least 2 points, got {}",
            x.len()
        )));
    }
    if x.iter().all(|&v| v == x[0]) {
        return Err(Error::ZeroVariance("regression abscissa".into()));
    }
    RegressionSums::of(x, y).line()
}

/// Line through `(k, y[k])` for `k = 0..N`, using the closed-form abscissa sums.
pub fn fit_line_equidistant<T: Scalar>(y: &[T]) -> Result<LineFit<T>> {
    if y.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "line fit needs at least 2 points, got {}",
            y.len()
        )));
    }
    let (sum_x, sum_x2) = equidistant_sums::<T>(y.len() as u64);
    let mut sum_y = T::zero();
    let mut sum_xy = T::zero();
    for (k, &v) in y.iter().enumerate() {
        sum_y = sum_y + v;
        sum_xy = sum_xy + T::from_usize_lossy(k) * v;
    }
    RegressionSums {
        n: T::from_usize_lossy(y.len()),
        sum_x,
        sum_y,
        sum_xy,
        sum_x2,
    }
    .line()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
        let fit = fit_line(&x, &y).unwrap();
        assert_eq!(fit.slope, 2.0);
        assert_eq!(fit.intercept, 3.0);
        assert_eq!(fit_line_equidistant(&y).unwrap(), fit);
    }

    #[test]
    fn flat_data_has_zero_slope() {
        let x = [1.0, 2.0, 5.0];
        let fit = fit_line(&x, &[4.0, 4.0, 4.0]).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.intercept, 4.0);
    }

    #[test]
    fn degenerate_abscissa() {
        assert!(matches!(
            fit_line(&[1.0, 1.0], &[0.0, 1.0]),
            Err(Error::ZeroVariance(_))
        ));
        assert!(fit_line(&[1.0], &[0.0]).is_err());
        assert!(fit_line(&[1.0, 2.0], &[0.0]).is_err());
    }

    #[test]
    fn closed_form_sums_for_four_bins() {
        assert_eq!(equidistant_sums::<u64>(4), (6, 14));
        assert_eq!(equidistant_sums::<f64>(4), (6.0, 14.0));
    }

    proptest! {
        #[test]
        fn closed_form_matches_enumeration(n in 1u64..5000) {
            let (sx, sx2) = equidistant_sums::<u128>(n);
            let ex: u128 = (0..n as u128).sum();
            let ex2: u128 = (0..n as u128).map(|k| k * k).sum();
            prop_assert_eq!(sx, ex);
            prop_assert_eq!(sx2, ex2);
            let x: Vec<f64> = (0..n).map(|k| k as f64).collect();
            let s = RegressionSums::of(&x, &x);
            prop_assert_eq!(s.sum_x, sx as f64);
            prop_assert_eq!(s.sum_x2, sx2 as f64);
        }

        #[test]
        fn equidistant_fit_equals_general_fit(y in proptest::collection::vec(-100.0f64..100.0, 2..200)) {
            let x: Vec<f64> = (0..y.len()).map(|k| k as f64).collect();
            let a = fit_line(&x, &y).unwrap();
            let b = fit_line_equidistant(&y).unwrap();
            prop_assert!((a.slope - b.slope).abs() <= 1e-9 * (1.0 + a.slope.abs()));
            prop_assert!((a.intercept - b.intercept).abs() <= 1e-7 * (1.0 + a.intercept.abs()));
        }
    }
}
