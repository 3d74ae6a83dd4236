//! Harmonic-plus-noise test signals with exactly known component energies,
//! and a surrogate 24-configuration dataset.
//!
//! Random numbers come from [`Prng`], a ChaCha20 stream generator whose output
//! is fixed by the seed on every platform.
//!
//! The surrogate dataset maps each label onto one controlled signal property:
//!
//! | label               | property                                   |
//! |---------------------|--------------------------------------------|
//! | subglottal pressure | amplitude scale 0.5 / 1 / 2 Pa             |
//! | GC1 … GC4           | harmonic-to-noise ratio 30 / 20 / 12 / 5 dB |
//! | asymmetric          | subharmonic at f0/2, 10 % of the fundamental |
//!
//! These values are conventions chosen to exercise the pipeline; they are not
//! measurements of real phonation.

use std::path::{Path, PathBuf};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dsp::fft;
use crate::error::{Error, Result};
use crate::io::{save_manifest, save_signal, SignalFormat};
use crate::signal::{
    ConfigRecord, LabelVector, Signal, SubglottalPressure, Symmetry, REFERENCE_SAMPLE_RATE,
};
use crate::PressureSignal;

/// Seeded pseudo-random source.
///
/// ChaCha20 keyed with the seed as little-endian bytes 0..8 of the 256-bit key
/// (remaining key bytes zero), stream id selectable, nonce counter from 0.
/// Uniform doubles use the top 53 bits: `((u >> 11) + 0.5) · 2⁻⁵³`, which lies
/// strictly inside (0, 1). Normal variates use the Box–Muller transform, both
/// outputs of a pair consumed in order.
#[derive(Debug, Clone)]
pub struct Prng {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl Prng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent stream `stream` under the same seed.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(stream);
        Self { rng, spare: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Uniform integer in `0..n` by rejection (no modulo bias). `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Fisher–Yates shuffle, last index first.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    #[default]
    White,
    /// −3 dB per octave: white noise with DFT bin `k` scaled by `1/sqrt(f_k)`
    /// and the DC bin zeroed.
    Pink,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub f0: f64,
    pub n_harmonics: usize,
    /// Amplitude of harmonic `k` at index `k − 1`, in Pa.
    pub harmonic_amps: Vec<f64>,
    /// Amplitude of an extra component at `f0/2`, in Pa.
    pub subharmonic_amp: f64,
    pub noise_kind: NoiseKind,
    /// Harmonic-to-noise energy ratio in dB; `+inf` adds no noise.
    pub target_hnr: f64,
    pub duration: f64,
    pub sample_rate: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// `n_harmonics` harmonics of `f0` with amplitudes `1/k²`, 1 s at the
    /// reference rate, white noise at the given ratio.
    pub fn voiced(f0: f64, n_harmonics: usize, target_hnr: f64, seed: u64) -> Self {
        Self {
            f0,
            n_harmonics,
            harmonic_amps: (1..=n_harmonics).map(|k| 1.0 / (k * k) as f64).collect(),
            subharmonic_amp: 0.0,
            noise_kind: NoiseKind::White,
            target_hnr,
            duration: 1.0,
            sample_rate: REFERENCE_SAMPLE_RATE,
            seed,
        }
    }

    /// Band-limited pulse train: every harmonic below Nyquist with amplitude 1.
    pub fn pulse_train(f0: f64, duration: f64, sample_rate: f64) -> Self {
        let n = ((sample_rate / 2.0) / f0).ceil() as usize - 1;
        Self {
            f0,
            n_harmonics: n,
            harmonic_amps: vec![1.0; n],
            subharmonic_amp: 0.0,
            noise_kind: NoiseKind::White,
            target_hnr: f64::INFINITY,
            duration,
            sample_rate,
            seed: 0,
        }
    }

    pub fn n_samples(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate > 0.0 && self.f0 > 0.0 && self.duration > 0.0) {
            return Err(Error::InvalidParameter(
                "f0, duration and sample rate must be positive".into(),
            ));
        }
        if self.harmonic_amps.len() != self.n_harmonics {
            return Err(Error::DimensionMismatch {
                expected: self.n_harmonics,
                got: self.harmonic_amps.len(),
            });
        }
        let top = self.f0 * self.n_harmonics as f64;
        if top >= self.sample_rate / 2.0 {
            return Err(Error::InvalidParameter(format!(
                "harmonic at {top} Hz aliases at sample rate {} Hz",
                self.sample_rate
            )));
        }
        if (self.n_samples() as f64) < 2.0 * self.sample_rate / self.f0 {
            return Err(Error::InvalidParameter(
                "duration must cover at least two fundamental periods".into(),
            ));
        }
        if self.target_hnr.is_nan() || self.target_hnr == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(format!(
                "target HNR must be finite or +inf, got {}",
                self.target_hnr
            )));
        }
        Ok(())
    }
}

/// Sum of zero-phase cosines at `k·f0` (plus the optional subharmonic).
pub fn synth_harmonic(spec: &SynthSpec) -> Result<PressureSignal> {
    spec.validate()?;
    let n = spec.n_samples();
    let w0 = 2.0 * std::f64::consts::PI * spec.f0 / spec.sample_rate;
    let mut x = vec![0.0; n];
    for (i, v) in x.iter_mut().enumerate() {
        let phase = w0 * i as f64;
        let mut acc = spec.subharmonic_amp * (0.5 * phase).cos();
        for (k, &a) in spec.harmonic_amps.iter().enumerate() {
            acc += a * ((k + 1) as f64 * phase).cos();
        }
        *v = acc;
    }
    Signal::new(x, spec.sample_rate)
}

/// `n` samples of seeded noise with unit sample variance before any scaling.
pub fn noise(kind: NoiseKind, n: usize, sample_rate: f64, prng: &mut Prng) -> Vec<f64> {
    let white: Vec<f64> = (0..n).map(|_| prng.gaussian()).collect();
    match kind {
        NoiseKind::White => white,
        NoiseKind::Pink => {
            let mut spec: Vec<Complex<f64>> = white.iter().map(|&v| Complex::new(v, 0.0)).collect();
            fft::forward_in_place(&mut spec);
            let df = sample_rate / n as f64;
            for (k, c) in spec.iter_mut().enumerate() {
                let kk = k.min(n - k);
                *c = if kk == 0 {
                    Complex::new(0.0, 0.0)
                } else {
                    *c / (kk as f64 * df).sqrt()
                };
            }
            fft::inverse_in_place(&mut spec);
            spec.iter().map(|c| c.re / n as f64).collect()
        }
    }
}

/// Adds seeded noise scaled so that `10·log10(E_harmonic / E_noise)` equals
/// `target_hnr` on the realised noise. `+inf` returns the input unchanged.
pub fn synth_mix(
    harmonic: &PressureSignal,
    noise_kind: NoiseKind,
    target_hnr: f64,
    seed: u64,
) -> Result<PressureSignal> {
    if target_hnr == f64::INFINITY {
        return Ok(harmonic.clone());
    }
    if !target_hnr.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "target HNR must be finite or +inf, got {target_hnr}"
        )));
    }
    let e_h = harmonic.energy();
    if !(e_h > 0.0) {
        return Err(Error::Degenerate("harmonic component has zero energy".into()));
    }
    let mut prng = Prng::new(seed);
    let nz = noise(noise_kind, harmonic.len(), harmonic.sample_rate(), &mut prng);
    let e_n: f64 = nz.iter().map(|v| v * v).sum();
    if !(e_n > 0.0) {
        return Err(Error::Degenerate("generated noise has zero energy".into()));
    }
    let gain = (e_h / (e_n * 10f64.powf(target_hnr / 10.0))).sqrt();
    let x = harmonic
        .samples()
        .iter()
        .zip(&nz)
        .map(|(h, n)| h + gain * n)
        .collect();
    Signal::new(x, harmonic.sample_rate())
}

/// Harmonic part plus noise as described by `spec`.
pub fn synth_signal(spec: &SynthSpec) -> Result<PressureSignal> {
    let h = synth_harmonic(spec)?;
    synth_mix(&h, spec.noise_kind, spec.target_hnr, spec.seed)
}

/// Signal-property mapping of the surrogate dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateConfig {
    pub f0: f64,
    pub n_harmonics: usize,
    pub duration: f64,
    pub sample_rate: f64,
    pub noise_kind: NoiseKind,
    /// Amplitude scale for 385, 775 and 1500 Pa.
    pub pressure_scale: [f64; 3],
    /// Harmonic-to-noise ratio for GC1..GC4, dB.
    pub gc_hnr_db: [f64; 4],
    /// Subharmonic amplitude relative to the fundamental for asymmetric folds.
    pub asymmetry_subharmonic: f64,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        Self {
            f0: 148.0,
            n_harmonics: 30,
            duration: 1.0,
            sample_rate: REFERENCE_SAMPLE_RATE,
            noise_kind: NoiseKind::White,
            pressure_scale: [0.5, 1.0, 2.0],
            gc_hnr_db: [30.0, 20.0, 12.0, 5.0],
            asymmetry_subharmonic: 0.1,
        }
    }
}

impl SurrogateConfig {
    /// Synthesis parameters of one configuration; `index` selects the noise stream.
    pub fn spec_for(&self, label: &LabelVector, seed: u64, index: u64) -> SynthSpec {
        let scale = match label.pressure {
            SubglottalPressure::Low => self.pressure_scale[0],
            SubglottalPressure::Normal => self.pressure_scale[1],
            SubglottalPressure::High => self.pressure_scale[2],
        };
        let hnr = self.gc_hnr_db[usize::from(label.gc.index()) - 1];
        let sub = match label.symmetry {
            Symmetry::Asymmetric => self.asymmetry_subharmonic * scale,
            Symmetry::Symmetric => 0.0,
        };
        SynthSpec {
            f0: self.f0,
            n_harmonics: self.n_harmonics,
            harmonic_amps: (1..=self.n_harmonics)
                .map(|k| scale / (k * k) as f64)
                .collect(),
            subharmonic_amp: sub,
            noise_kind: self.noise_kind,
            target_hnr: hnr,
            duration: self.duration,
            sample_rate: self.sample_rate,
            seed: derive_seed(seed, index),
        }
    }
}

/// Per-configuration seed: the first output of stream `index + 1` under `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    Prng::with_stream(seed, index + 1).next_u64()
}

/// Identifier of a configuration, e.g. `p0775_gc2_sym1`.
pub fn config_id(label: &LabelVector) -> String {
    format!(
        "p{:04}_gc{}_sym{}",
        label.pressure.pascal(),
        label.gc.index(),
        label.symmetry.code()
    )
}

/// One generated configuration.
#[derive(Debug, Clone)]
pub struct SurrogateEntry {
    pub record: ConfigRecord,
    pub spec: SynthSpec,
    pub signal: PressureSignal,
}

/// The full 3×4×2 factorial in pressure-major order.
pub fn synth_surrogate_dataset(seed: u64) -> Result<Vec<SurrogateEntry>> {
    synth_surrogate_dataset_with(seed, &SurrogateConfig::default())
}

pub fn synth_surrogate_dataset_with(seed: u64, cfg: &SurrogateConfig) -> Result<Vec<SurrogateEntry>> {
    LabelVector::factorial()
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            let spec = cfg.spec_for(&label, seed, i as u64);
            let signal = synth_signal(&spec)?;
            let id = config_id(&label);
            Ok(SurrogateEntry {
                record: ConfigRecord {
                    signal_path: PathBuf::from("signals").join(format!("{id}.f64")),
                    id,
                    label,
                },
                spec,
                signal,
            })
        })
        .collect()
}

/// Writes `manifest.csv` and `signals/<id>.f64` (with rate sidecars) under `dir`.
pub fn write_surrogate_dataset(
    dir: &Path,
    seed: u64,
    cfg: &SurrogateConfig,
) -> Result<Vec<ConfigRecord>> {
    let entries = synth_surrogate_dataset_with(seed, cfg)?;
    let sig_dir = dir.join("signals");
    std::fs::create_dir_all(&sig_dir).map_err(|e| Error::io(&sig_dir, e))?;
    for e in &entries {
        save_signal(&e.signal, &dir.join(&e.record.signal_path), SignalFormat::RawFloat64)?;
    }
    let records: Vec<ConfigRecord> = entries.into_iter().map(|e| e.record).collect();
    save_manifest(&records, &dir.join("manifest.csv"))?;
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::GlottalClosure;

    #[test]
    fn prng_is_reproducible_and_stream_separated() {
        let a: Vec<u64> = {
            let mut p = Prng::new(7);
            (0..4).map(|_| p.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut p = Prng::new(7);
            (0..4).map(|_| p.next_u64()).collect()
        };
        assert_eq!(a, b);
        let mut other = Prng::with_stream(7, 1);
        assert_ne!(a[0], other.next_u64());
    }

    #[test]
    fn uniform_is_open_interval_and_gaussian_is_standard() {
        let mut p = Prng::new(1);
        let n = 200_000;
        let g: Vec<f64> = (0..n).map(|_| p.gaussian()).collect();
        let mean = g.iter().sum::<f64>() / n as f64;
        let var = g.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "{mean}");
        assert!((var - 1.0).abs() < 0.01, "{var}");
        for _ in 0..10_000 {
            let u = p.uniform();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn below_and_shuffle() {
        let mut p = Prng::new(3);
        let mut counts = [0usize; 3];
        for _ in 0..30_000 {
            counts[p.below(3) as usize] += 1;
        }
        assert!(counts.iter().all(|&c| (c as f64 - 10_000.0).abs() < 400.0));
        let mut v: Vec<u32> = (0..20).collect();
        p.shuffle(&mut v);
        let mut s = v.clone();
        s.sort();
        assert_eq!(s, (0..20).collect::<Vec<_>>());
        assert_ne!(v, s);
    }

    #[test]
    fn single_harmonic_rms() {
        let mut spec = SynthSpec::voiced(148.0, 1, f64::INFINITY, 0);
        spec.harmonic_amps = vec![1.0];
        let s = synth_harmonic(&spec).unwrap();
        let rms = (s.energy() / s.len() as f64).sqrt();
        assert!((rms * 2f64.sqrt() - 1.0).abs() < 0.005, "{rms}");
    }

    #[test]
    fn two_equal_harmonics_double_energy() {
        let mut one = SynthSpec::voiced(148.0, 1, f64::INFINITY, 0);
        one.harmonic_amps = vec![1.0];
        let mut two = SynthSpec::voiced(148.0, 2, f64::INFINITY, 0);
        two.harmonic_amps = vec![1.0, 1.0];
        let e1 = synth_harmonic(&one).unwrap().energy();
        let e2 = synth_harmonic(&two).unwrap().energy();
        assert!((e2 / e1 - 2.0).abs() < 0.005);
        let expected = 2.0 * 0.5 * two.n_samples() as f64;
        assert!((e2 / expected - 1.0).abs() < 0.005);
    }

    #[test]
    fn aliasing_and_short_specs_are_rejected() {
        let spec = SynthSpec::voiced(148.0, 300, 10.0, 0);
        assert!(synth_harmonic(&spec).is_err());
        let mut short = SynthSpec::voiced(148.0, 5, 10.0, 0);
        short.duration = 0.01;
        assert!(synth_harmonic(&short).is_err());
        let mut mismatch = SynthSpec::voiced(148.0, 5, 10.0, 0);
        mismatch.harmonic_amps.pop();
        assert!(synth_harmonic(&mismatch).is_err());
    }

    #[test]
    fn mix_imposes_exact_energy_ratio() {
        let h = synth_harmonic(&SynthSpec::voiced(148.0, 10, 0.0, 0)).unwrap();
        for (target, kind) in [(0.0, NoiseKind::White), (10.0, NoiseKind::Pink)] {
            let m = synth_mix(&h, kind, target, 42).unwrap();
            let e_n: f64 = m
                .samples()
                .iter()
                .zip(h.samples())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let realised = 10.0 * (h.energy() / e_n).log10();
            assert!((realised - target).abs() < 1e-9, "{realised}");
        }
        assert_eq!(synth_mix(&h, NoiseKind::White, f64::INFINITY, 1).unwrap(), h);
        assert!(synth_mix(&h, NoiseKind::White, f64::NAN, 1).is_err());
        let z = Signal::new(vec![0.0; 100], 1000.0).unwrap();
        assert!(synth_mix(&z, NoiseKind::White, 0.0, 1).is_err());
    }

    #[test]
    fn pink_noise_falls_three_db_per_octave() {
        let fs = 8192.0;
        let n = 1 << 16;
        let mut p = Prng::new(11);
        let x = noise(NoiseKind::Pink, n, fs, &mut p);
        let mut spec: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
        fft::forward_in_place(&mut spec);
        let df = fs / n as f64;
        let band = |lo: f64| {
            let (a, b) = ((lo / df) as usize, (2.0 * lo / df) as usize);
            spec[a..b].iter().map(|c| c.norm_sqr()).sum::<f64>()
        };
        // equal energy per octave
        let ratio = 10.0 * (band(100.0) / band(1000.0)).log10();
        assert!(ratio.abs() < 0.5, "{ratio}");
        assert!(spec[0].norm() < 1e-6);
    }

    #[test]
    fn pulse_train_stays_below_nyquist() {
        let s = SynthSpec::pulse_train(148.0, 1.0, REFERENCE_SAMPLE_RATE);
        assert!(s.validate().is_ok());
        assert!(s.f0 * (s.n_harmonics + 1) as f64 >= REFERENCE_SAMPLE_RATE / 2.0);
    }

    #[test]
    fn surrogate_specs_follow_the_mapping() {
        let cfg = SurrogateConfig::default();
        let label = LabelVector::new(SubglottalPressure::High, GlottalClosure::Gc3, Symmetry::Asymmetric);
        let s = cfg.spec_for(&label, 5, 0);
        assert_eq!(s.harmonic_amps[0], 2.0);
        assert_eq!(s.target_hnr, 12.0);
        assert!((s.subharmonic_amp - 0.2).abs() < 1e-15);
        assert_eq!(config_id(&label), "p1500_gc3_sym0");
        let sym = LabelVector::new(SubglottalPressure::Low, GlottalClosure::Gc1, Symmetry::Symmetric);
        assert_eq!(cfg.spec_for(&sym, 5, 1).subharmonic_amp, 0.0);
        assert_ne!(derive_seed(5, 0), derive_seed(5, 1));
    }
}
