use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::scalar::Scalar;

/// Forward DFT of a real sequence, full complex output of the same length.
pub(crate) fn forward_real<T: Scalar>(x: &[T]) -> Vec<Complex<T>> {
    let mut buf: Vec<Complex<T>> = x.iter().map(|&v| Complex::new(v, T::zero())).collect();
    forward_in_place(&mut buf);
    buf
}

pub(crate) fn forward_in_place<T: Scalar>(buf: &mut [Complex<T>]) {
    if buf.is_empty() {
        return;
    }
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}

/// Unnormalized inverse DFT.
pub(crate) fn inverse_in_place<T: Scalar>(buf: &mut [Complex<T>]) {
    if buf.is_empty() {
        return;
    }
    FftPlanner::new().plan_fft_inverse(buf.len()).process(buf);
}
