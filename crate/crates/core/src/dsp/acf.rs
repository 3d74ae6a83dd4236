//! Raw (un-normalized) autocorrelation.
//!
//! `r(τ) = Σ_n p[n]·p[n+τ]` for lags `0..N`. How `p[n+τ]` is read past the
//! end of the record is selected by [`AcfMode`]: zero-padded (the sum simply
//! stops) or circular (the record is one period of a periodic signal).

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dsp::fft;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::Signal;

/// Above this length the zero-padded ACF is evaluated through the FFT.
pub const DIRECT_ACF_MAX_LEN: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AcfMode {
    /// Samples beyond the record are zero; `r(τ)` decays like `(1 - τ/N)`.
    ZeroPadded,
    /// Indices wrap modulo `N`.
    #[default]
    Circular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcfSeries<T> {
    values: Vec<T>,
    mode: AcfMode,
}

impl<T: Scalar> AcfSeries<T> {
    /// `r(τ)` for `τ = 0..N`, lag unit samples.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn mode(&self) -> AcfMode {
        self.mode
    }

    pub fn energy(&self) -> T {
        self.values[0]
    }

    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    /// Largest value and its lag over `lags` (inclusive bounds, clamped to the series).
    pub fn max_in(&self, first: usize, last: usize) -> Option<(usize, T)> {
        let last = last.min(self.max_lag());
        if first > last {
            return None;
        }
        let mut best = (first, self.values[first]);
        for (lag, &v) in self.values.iter().enumerate().take(last + 1).skip(first + 1) {
            if v > best.1 {
                best = (lag, v);
            }
        }
        Some(best)
    }
}

/// Zero-padded ACF of a signal (direct sum up to 8192 samples, FFT above).
pub fn autocorrelation<T: Scalar>(signal: &Signal<T>) -> Result<AcfSeries<T>> {
    autocorrelation_with(signal, AcfMode::ZeroPadded)
}

pub fn autocorrelation_with<T: Scalar>(signal: &Signal<T>, mode: AcfMode) -> Result<AcfSeries<T>> {
    signal.require_nonempty()?;
    let x = signal.samples();
    let values = match mode {
        AcfMode::ZeroPadded if x.len() <= DIRECT_ACF_MAX_LEN => autocorrelation_direct(x),
        AcfMode::ZeroPadded => autocorrelation_fft(x),
        AcfMode::Circular if x.len() <= DIRECT_ACF_MAX_LEN => circular_autocorrelation_direct(x),
        AcfMode::Circular => circular_autocorrelation(x),
    };
    Ok(AcfSeries { values, mode })
}

/// Zero-padded ACF by the literal double sum.
pub fn autocorrelation_direct<T: Scalar>(x: &[T]) -> Vec<T> {
    let n = x.len();
    (0..n)
        .map(|lag| {
            let mut acc = T::zero();
            for i in 0..n - lag {
                acc = acc + x[i] * x[i + lag];
            }
            acc
        })
        .collect()
}

/// Zero-padded ACF via a power-of-two FFT of at least `2N - 1` points.
pub fn autocorrelation_fft<T: Scalar>(x: &[T]) -> Vec<T> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let m = (2 * n - 1).next_power_of_two();
    let mut buf: Vec<Complex<T>> = x
        .iter()
        .map(|&v| Complex::new(v, T::zero()))
        .chain(std::iter::repeat_n(Complex::new(T::zero(), T::zero()), m - n))
        .collect();
    power_then_inverse(&mut buf);
    let scale = T::from_usize_lossy(m);
    buf[..n].iter().map(|c| c.re / scale).collect()
}

/// Circular ACF by the literal double sum.
pub fn circular_autocorrelation_direct<T: Scalar>(x: &[T]) -> Vec<T> {
    let n = x.len();
    (0..n)
        .map(|lag| {
            let mut acc = T::zero();
            for i in 0..n {
                acc = acc + x[i] * x[(i + lag) % n];
            }
            acc
        })
        .collect()
}

/// Circular ACF via an `N`-point FFT.
pub fn circular_autocorrelation<T: Scalar>(x: &[T]) -> Vec<T> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let mut buf: Vec<Complex<T>> = x.iter().map(|&v| Complex::new(v, T::zero())).collect();
    power_then_inverse(&mut buf);
    let scale = T::from_usize_lossy(n);
    buf.iter().map(|c| c.re / scale).collect()
}

fn power_then_inverse<T: Scalar>(buf: &mut [Complex<T>]) {
    fft::forward_in_place(buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), T::zero());
    }
    fft::inverse_in_place(buf);
}

/// Guard used by callers that need a strictly positive zero-lag energy.
pub(crate) fn require_energy<T: Scalar>(acf: &AcfSeries<T>) -> Result<()> {
    if acf.energy() > T::zero() {
        Ok(())
    } else {
        Err(Error::Degenerate("signal has zero energy".into()))
    }
}
