//! Welch power spectral density estimation.

use serde::{Deserialize, Serialize};

use crate::dsp::fft;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::{Signal, REFERENCE_PRESSURE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    #[default]
    Hann,
    Hamming,
    Rectangular,
}

impl WindowKind {
    /// Periodic (DFT-even) window of length `len`.
    pub fn coefficients<T: Scalar>(self, len: usize) -> Vec<T> {
        let two_pi = T::lit(2.0) * T::PI();
        let l = T::from_usize_lossy(len);
        (0..len)
            .map(|n| {
                let phase = two_pi * T::from_usize_lossy(n) / l;
                match self {
                    Self::Hann => T::lit(0.5) - T::lit(0.5) * phase.cos(),
                    Self::Hamming => T::lit(0.54) - T::lit(0.46) * phase.cos(),
                    Self::Rectangular => T::one(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchConfig {
    /// Segment length in samples; `None` picks [`default_segment_len`].
    pub segment_len: Option<usize>,
    /// Fractional overlap of consecutive segments in `[0, 1)`.
    pub overlap: f64,
    pub window: WindowKind,
}

impl Default for WelchConfig {
    fn default() -> Self {
        Self {
            segment_len: None,
            overlap: 0.5,
            window: WindowKind::Hann,
        }
    }
}

impl WelchConfig {
    /// Segment length used for a signal of `n` samples at `sample_rate`.
    pub fn resolve_segment_len(&self, n: usize, sample_rate: f64) -> usize {
        match self.segment_len {
            Some(l) => l,
            None => {
                let d = default_segment_len(sample_rate);
                if d <= n {
                    d
                } else {
                    // largest power of two that fits
                    1usize << (usize::BITS - 1 - n.max(1).leading_zeros())
                }
            }
        }
    }
}

/// Power of two closest (in log scale) to a quarter second of samples.
/// At 73 529 Hz this is 16 384 samples, a 4.49 Hz bin spacing.
pub fn default_segment_len(sample_rate: f64) -> usize {
    let quarter = (sample_rate / 4.0).max(2.0);
    1usize << quarter.log2().round() as u32
}

/// One-sided spectral estimate: `magnitudes[k] = sqrt(PSD[k])`, with the PSD
/// scaled as a density so that `Σ PSD[k]·Δf` equals the mean signal power.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate<T> {
    magnitudes: Vec<T>,
    magnitudes_db: Vec<T>,
    bin_hz: T,
}

impl<T: Scalar> SpectralEstimate<T> {
    pub fn new(magnitudes: Vec<T>, bin_hz: T) -> Result<Self> {
        if !(bin_hz > T::zero()) || !bin_hz.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bin spacing must be positive, got {bin_hz}"
            )));
        }
        if let Some(k) = magnitudes.iter().position(|m| !(*m >= T::zero()) || !m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "magnitude at bin {k} is negative or not finite"
            )));
        }
        let p0 = T::lit(REFERENCE_PRESSURE);
        let magnitudes_db = magnitudes
            .iter()
            .map(|&m| {
                if m > T::zero() {
                    T::lit(20.0) * (m / p0).log10()
                } else {
                    T::neg_infinity()
                }
            })
            .collect();
        Ok(Self {
            magnitudes,
            magnitudes_db,
            bin_hz,
        })
    }

    pub fn magnitudes(&self) -> &[T] {
        &self.magnitudes
    }

    /// `20·log10(p̃[k] / 20 µPa)`; `-inf` for zero bins.
    pub fn magnitudes_db(&self) -> &[T] {
        &self.magnitudes_db
    }

    /// dB spectrum with every entry raised to at least `floor_db`.
    pub fn magnitudes_db_floored(&self, floor_db: T) -> Vec<T> {
        self.magnitudes_db.iter().map(|&d| d.max(floor_db)).collect()
    }

    pub fn bin_hz(&self) -> T {
        self.bin_hz
    }

    pub fn n_bins(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn frequency(&self, k: usize) -> T {
        T::from_usize_lossy(k) * self.bin_hz
    }

    pub fn max_frequency(&self) -> T {
        self.frequency(self.n_bins().saturating_sub(1))
    }

    pub fn psd(&self) -> Vec<T> {
        self.magnitudes.iter().map(|&m| m * m).collect()
    }

    /// `Σ PSD·Δf`, the mean power represented by the estimate.
    pub fn band_power(&self) -> T {
        self.magnitudes.iter().map(|&m| m * m).sum::<T>() * self.bin_hz
    }

    /// Highest bin index whose frequency does not exceed `hz`.
    pub fn highest_bin_at_most(&self, hz: T) -> Option<usize> {
        if hz < T::zero() {
            return None;
        }
        let k = (hz / self.bin_hz).floor().to_usize()?;
        let k = k.min(self.n_bins().checked_sub(1)?);
        // floor() may land one bin high after rounding
        if self.frequency(k) > hz {
            k.checked_sub(1)
        } else {
            Some(k)
        }
    }

    /// Lowest bin index whose frequency is at least `hz`.
    pub fn lowest_bin_at_least(&self, hz: T) -> Option<usize> {
        let k = (hz.max(T::zero()) / self.bin_hz).ceil().to_usize()?;
        let k = if k > 0 && self.frequency(k - 1) >= hz {
            k - 1
        } else {
            k
        };
        (k < self.n_bins()).then_some(k)
    }

    /// The estimate restricted to bins with frequency `<= max_hz`.
    pub fn band_limited(&self, max_hz: T) -> Result<Self> {
        let last = self.highest_bin_at_most(max_hz).ok_or_else(|| {
            Error::InvalidParameter(format!("band limit {max_hz} Hz below the first bin"))
        })?;
        Ok(Self {
            magnitudes: self.magnitudes[..=last].to_vec(),
            magnitudes_db: self.magnitudes_db[..=last].to_vec(),
            bin_hz: self.bin_hz,
        })
    }
}

/// Averaged modified periodogram of `signal`.
pub fn welch_psd<T: Scalar>(signal: &Signal<T>, cfg: &WelchConfig) -> Result<SpectralEstimate<T>> {
    signal.require_nonempty()?;
    let n = signal.len();
    let fs = signal.sample_rate();
    let seg = cfg.resolve_segment_len(n, fs.to_f64_lossy());
    if seg < 2 {
        return Err(Error::InvalidParameter(format!(
            "segment length must be at least 2, got {seg}"
        )));
    }
    if seg > n {
        return Err(Error::InvalidParameter(format!(
            "segment length {seg} exceeds signal length {n}"
        )));
    }
    if !(0.0..1.0).contains(&cfg.overlap) {
        return Err(Error::InvalidParameter(format!(
            "overlap must lie in [0, 1), got {}",
            cfg.overlap
        )));
    }
    let hop = ((seg as f64) * (1.0 - cfg.overlap)).round().max(1.0) as usize;
    let window: Vec<T> = cfg.window.coefficients(seg);
    let window_power: T = window.iter().map(|&w| w * w).sum();

    let n_bins = seg / 2 + 1;
    let mut acc = vec![T::zero(); n_bins];
    let mut segments = 0usize;
    let x = signal.samples();
    let mut start = 0;
    while start + seg <= n {
        let frame: Vec<T> = x[start..start + seg]
            .iter()
            .zip(&window)
            .map(|(&s, &w)| s * w)
            .collect();
        let spec = fft::forward_real(&frame);
        for (a, c) in acc.iter_mut().zip(&spec[..n_bins]) {
            *a = *a + c.norm_sqr();
        }
        segments += 1;
        start += hop;
    }

    let norm = T::from_usize_lossy(segments) * fs * window_power;
    let two = T::lit(2.0);
    let nyquist_bin = if seg.is_multiple_of(2) { Some(n_bins - 1) } else { None };
    let magnitudes = acc
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let one_sided = if k == 0 || Some(k) == nyquist_bin {
                p
            } else {
                two * p
            };
            (one_sided / norm).sqrt()
        })
        .collect();
    SpectralEstimate::new(magnitudes, fs / T::from_usize_lossy(seg))
}
