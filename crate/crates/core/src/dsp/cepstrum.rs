//! Power cepstrum of a dB spectrum.
//!
//! `c[q] = 10·log10 |DFT_k{ p̃_dB[k] }[q]|²`, where the one-sided dB spectrum
//! is mirrored to its full even-symmetric length `M = 2(n_bins - 1)` before
//! the transform. The quefrency step is therefore `1 / (M·Δf)`.

use rustfft::num_complex::Complex;

use crate::dsp::fft;
use crate::dsp::welch::SpectralEstimate;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Floor applied to zero-magnitude bins before the transform, in dB re 20 µPa.
pub const DB_FLOOR: f64 = -200.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CepstrumSeries<T> {
    power: Vec<T>,
    values: Vec<T>,
    quefrency_step: T,
}

impl<T: Scalar> CepstrumSeries<T> {
    fn from_power(power: Vec<T>, quefrency_step: T) -> Self {
        let tiny = T::min_positive_value();
        let values = power
            .iter()
            .map(|&p| T::lit(10.0) * p.max(tiny).log10())
            .collect();
        Self {
            power,
            values,
            quefrency_step,
        }
    }

    /// Cepstrum in dB for quefrency bins `0..=M/2`.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Linear squared magnitude behind [`values`](Self::values).
    pub fn power(&self) -> &[T] {
        &self.power
    }

    pub fn quefrency_step(&self) -> T {
        self.quefrency_step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Quefrency of bin `q` in seconds.
    pub fn quefrency(&self, q: usize) -> T {
        T::from_usize_lossy(q) * self.quefrency_step
    }

    /// First bin whose quefrency is at least `seconds`.
    pub fn first_bin_at_least(&self, seconds: T) -> usize {
        let q = (seconds / self.quefrency_step).ceil();
        q.to_usize().unwrap_or(0)
    }

    /// Moving average of the linear power over a centred window of about
    /// `width` seconds (odd number of bins, truncated at the ends), returned
    /// in dB. A width below one bin returns the series unchanged.
    pub fn smoothed(&self, width: T) -> Self {
        let bins = (width / self.quefrency_step).round().to_usize().unwrap_or(0);
        let half = bins / 2;
        if half == 0 {
            return self.clone();
        }
        let n = self.power.len();
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(T::zero());
        for &p in &self.power {
            let last = *prefix.last().expect("nonempty");
            prefix.push(last + p);
        }
        let power = (0..n)
            .map(|i| {
                let lo = i.saturating_sub(half);
                let hi = (i + half).min(n - 1);
                (prefix[hi + 1] - prefix[lo]) / T::from_usize_lossy(hi + 1 - lo)
            })
            .collect();
        Self::from_power(power, self.quefrency_step)
    }
}

/// Cepstrum with zero-magnitude bins floored at [`DB_FLOOR`].
pub fn cepstrum<T: Scalar>(spec: &SpectralEstimate<T>) -> Result<CepstrumSeries<T>> {
    cepstrum_with_floor(spec, T::lit(DB_FLOOR))
}

pub fn cepstrum_with_floor<T: Scalar>(
    spec: &SpectralEstimate<T>,
    floor_db: T,
) -> Result<CepstrumSeries<T>> {
    let n_bins = spec.n_bins();
    if n_bins < 2 {
        return Err(Error::InvalidParameter(format!(
            "cepstrum needs at least 2 spectral bins, got {n_bins}"
        )));
    }
    let db = spec.magnitudes_db_floored(floor_db);
    let m = 2 * (n_bins - 1);
    let mut buf: Vec<Complex<T>> = Vec::with_capacity(m);
    buf.extend(db.iter().map(|&d| Complex::new(d, T::zero())));
    buf.extend(db[1..n_bins - 1].iter().rev().map(|&d| Complex::new(d, T::zero())));
    fft::forward_in_place(&mut buf);
    let power = buf[..n_bins].iter().map(|c| c.norm_sqr()).collect();
    let step = T::one() / (T::from_usize_lossy(m) * spec.bin_hz());
    Ok(CepstrumSeries::from_power(power, step))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_from_db(db: &[f64], bin_hz: f64) -> SpectralEstimate<f64> {
        let mags = db.iter().map(|d| 20e-6 * 10f64.powf(d / 20.0)).collect();
        SpectralEstimate::new(mags, bin_hz).unwrap()
    }

    #[test]
    fn constant_spectrum_concentrates_at_zero_quefrency() {
        let spec = spec_from_db(&vec![40.0; 257], 10.0);
        let c = cepstrum(&spec).unwrap();
        assert_eq!(c.len(), 257);
        let dc = c.values()[0];
        for &v in &c.values()[1..] {
            assert!(dc - v > 200.0, "dc {dc}, other {v}");
        }
        assert!((c.quefrency_step() - 1.0 / (512.0 * 10.0)).abs() < 1e-15);
    }

    #[test]
    fn cosine_ripple_peaks_at_its_quefrency() {
        let period_bins = 16.0;
        let bin_hz = 5.0;
        let db: Vec<f64> = (0..513)
            .map(|k| 50.0 + 6.0 * (2.0 * std::f64::consts::PI * k as f64 / period_bins).cos())
            .collect();
        let c = cepstrum(&spec_from_db(&db, bin_hz)).unwrap();
        let peak = (1..c.len())
            .max_by(|&a, &b| c.values()[a].partial_cmp(&c.values()[b]).unwrap())
            .unwrap();
        let expected = 1.0 / (period_bins * bin_hz);
        assert!((c.quefrency(peak) - expected).abs() < 1e-12);
    }

    #[test]
    fn too_few_bins_is_error() {
        let spec = SpectralEstimate::new(vec![1.0], 1.0).unwrap();
        assert!(cepstrum(&spec).is_err());
    }

    #[test]
    fn zero_bins_are_floored_not_infinite() {
        let spec = SpectralEstimate::<f64>::new(vec![0.0, 1.0, 0.0, 1.0, 0.0], 1.0).unwrap();
        let c = cepstrum(&spec).unwrap();
        assert!(c.values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn smoothing_preserves_constant_power() {
        let c = CepstrumSeries::from_power(vec![4.0; 50], 1e-4);
        let s = c.smoothed(1e-3);
        for v in s.values() {
            assert!((v - 10.0 * 4f64.log10()).abs() < 1e-12);
        }
        // narrower than a bin: untouched
        assert_eq!(c.smoothed(1e-5), c);
    }
}
