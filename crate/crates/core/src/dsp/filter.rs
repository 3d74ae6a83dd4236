//! Linear-phase FIR low-pass filtering (Kaiser-windowed sinc).
//!
//! The filter is applied as a centred circular convolution over the signal
//! length: the output has the same length as the input, no group delay, and
//! treats the record as one period of a periodic signal.

use rustfft::num_complex::Complex;

use crate::dsp::fft;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::Signal;

pub const DEFAULT_STOPBAND_ATTENUATION_DB: f64 = 60.0;

/// Passband edge as a fraction of the cutoff; the transition band is
/// symmetric around the cutoff.
const PASSBAND_EDGE_FRACTION: f64 = 0.8;

#[derive(Debug, Clone)]
pub struct FirLowpass {
    taps: Vec<f64>,
    cutoff: f64,
    sample_rate: f64,
}

impl FirLowpass {
    /// Designs a low-pass with -6 dB point at `cutoff`, passband up to
    /// `0.8 * cutoff` and the given stopband attenuation from `1.2 * cutoff`.
    pub fn design(cutoff: f64, sample_rate: f64, attenuation_db: f64) -> Result<Self> {
        let nyquist = sample_rate / 2.0;
        if !(cutoff > 0.0 && cutoff < nyquist) {
            return Err(Error::InvalidParameter(format!(
                "cutoff {cutoff} Hz must lie in (0, {nyquist}) Hz"
            )));
        }
        if !(attenuation_db > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "stopband attenuation must be positive, got {attenuation_db}"
            )));
        }
        let half_transition = ((1.0 - PASSBAND_EDGE_FRACTION) * cutoff).min(nyquist - cutoff);
        let delta_omega = 2.0 * std::f64::consts::PI * (2.0 * half_transition) / sample_rate;
        let mut len = ((attenuation_db - 7.95) / (2.285 * delta_omega)).ceil().max(1.0) as usize + 1;
        if len.is_multiple_of(2) {
            len += 1;
        }
        let beta = kaiser_beta(attenuation_db);
        let centre = (len / 2) as f64;
        let norm_cut = 2.0 * cutoff / sample_rate;
        let i0_beta = bessel_i0(beta);
        let mut taps: Vec<f64> = (0..len)
            .map(|n| {
                let t = n as f64 - centre;
                let r = t / centre.max(1.0);
                let w = bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / i0_beta;
                norm_cut * sinc(norm_cut * t) * w
            })
            .collect();
        let dc: f64 = taps.iter().sum();
        taps.iter_mut().for_each(|t| *t /= dc);
        Ok(Self {
            taps,
            cutoff,
            sample_rate,
        })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Real (zero-phase) amplitude response at `freq` Hz.
    pub fn amplitude_response(&self, freq: f64) -> f64 {
        let centre = (self.taps.len() / 2) as f64;
        let w = 2.0 * std::f64::consts::PI * freq / self.sample_rate;
        self.taps
            .iter()
            .enumerate()
            .map(|(n, h)| h * (w * (n as f64 - centre)).cos())
            .sum()
    }

    pub fn apply<T: Scalar>(&self, signal: &Signal<T>) -> Result<Signal<T>> {
        signal.require_nonempty()?;
        let rate = signal.sample_rate().to_f64_lossy();
        if (rate - self.sample_rate).abs() > 1e-9 * self.sample_rate {
            return Err(Error::InvalidParameter(format!(
                "filter designed for {} Hz applied to {rate} Hz signal",
                self.sample_rate
            )));
        }
        let n = signal.len();
        let centre = self.taps.len() / 2;
        // kernel wrapped onto the signal period, centre tap at index 0
        let mut kernel = vec![T::zero(); n];
        for (i, &h) in self.taps.iter().enumerate() {
            let idx = (i as isize - centre as isize).rem_euclid(n as isize) as usize;
            kernel[idx] = kernel[idx] + T::lit(h);
        }
        let kspec = fft::forward_real(&kernel);
        let mut x = fft::forward_real(signal.samples());
        for (xi, ki) in x.iter_mut().zip(&kspec) {
            // symmetric kernel: the response is real up to rounding
            *xi = *xi * Complex::new(ki.re, T::zero());
        }
        fft::inverse_in_place(&mut x);
        let scale = T::from_usize_lossy(n);
        Ok(signal.with_samples(x.iter().map(|c| c.re / scale).collect()))
    }
}

/// Low-pass filters `signal` at `cutoff` Hz with the default 60 dB design.
pub fn lowpass<T: Scalar>(signal: &Signal<T>, cutoff: f64) -> Result<Signal<T>> {
    FirLowpass::design(
        cutoff,
        signal.sample_rate().to_f64_lossy(),
        DEFAULT_STOPBAND_ATTENUATION_DB,
    )?
    .apply(signal)
}

fn kaiser_beta(a: f64) -> f64 {
    if a > 50.0 {
        0.1102 * (a - 8.7)
    } else if a >= 21.0 {
        0.5842 * (a - 21.0).powf(0.4) + 0.07886 * (a - 21.0)
    } else {
        0.0
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Modified Bessel function of the first kind, order zero (power series).
fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > 1e-17 * sum {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::REFERENCE_SAMPLE_RATE as FS;

    fn tone(freq: f64, n: usize) -> Signal<f64> {
        let s = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * freq * i as f64 / FS).sin())
            .collect();
        Signal::new(s, FS).unwrap()
    }

    fn rms(x: &[f64]) -> f64 {
        (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
    }

    #[test]
    fn bessel_i0_reference_values() {
        assert!((bessel_i0(0.0) - 1.0).abs() < 1e-15);
        // I0(1) = 1.2660658777520082
        assert!((bessel_i0(1.0) - 1.266_065_877_752_008_2).abs() < 1e-14);
    }

    #[test]
    fn design_meets_band_edges() {
        for fc in [2000.0, 5000.0] {
            let f = FirLowpass::design(fc, FS, 60.0).unwrap();
            assert_eq!(f.taps().len() % 2, 1);
            let mut freq = 0.0;
            while freq <= 0.8 * fc {
                let g = 20.0 * f.amplitude_response(freq).abs().log10();
                assert!(g.abs() <= 0.1, "ripple {g} dB at {freq} Hz");
                freq += 5.0;
            }
            let mut freq = 2.0 * fc;
            while freq < FS / 2.0 {
                let g = 20.0 * f.amplitude_response(freq).abs().max(1e-300).log10();
                assert!(g <= -60.0, "stopband {g} dB at {freq} Hz");
                freq += 17.0;
            }
        }
    }

    #[test]
    fn rejects_cutoff_at_or_above_nyquist() {
        assert!(FirLowpass::design(FS / 2.0, FS, 60.0).is_err());
        assert!(FirLowpass::design(0.0, FS, 60.0).is_err());
    }

    #[test]
    fn passband_sine_is_unchanged() {
        let x = tone(1000.0, 20_000);
        let y = lowpass(&x, 5000.0).unwrap();
        assert_eq!(y.len(), x.len());
        let inner = 2000..18_000;
        let g = 20.0 * (rms(&y.samples()[inner.clone()]) / rms(&x.samples()[inner])).log10();
        assert!(g.abs() < 0.1, "gain {g} dB");
    }

    #[test]
    fn stopband_sine_is_attenuated() {
        let x = tone(10_000.0, 20_000);
        let y = lowpass(&x, 5000.0).unwrap();
        let inner = 2000..18_000;
        let g = 20.0 * (rms(&y.samples()[inner.clone()]) / rms(&x.samples()[inner])).log10();
        assert!(g <= -60.0, "attenuation only {g} dB");
    }

    #[test]
    fn dc_passes() {
        let x = Signal::new(vec![0.7; 4096], FS).unwrap();
        let y = lowpass(&x, 2000.0).unwrap();
        for v in y.samples() {
            assert!((20.0 * (v / 0.7).log10()).abs() < 0.1);
        }
    }

    #[test]
    fn zero_phase_on_periodic_record() {
        // 148 Hz over exactly 148 periods: the output must be the input scaled,
        // with no shift.
        let x = tone(148.0, FS as usize);
        let y = lowpass(&x, 2000.0).unwrap();
        let max_err = x
            .samples()
            .iter()
            .zip(y.samples())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_err < 2e-3, "max deviation {max_err}");
    }

    #[test]
    fn works_in_single_precision() {
        let x: Signal<f32> = tone(1000.0, 8192).cast();
        let y = lowpass(&x, 5000.0).unwrap();
        assert_eq!(y.len(), 8192);
        assert!(y.samples().iter().all(|v| v.is_finite()));
    }
}
