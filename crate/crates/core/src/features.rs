//! The nine acoustic features and their assembly into a [`FeatureVector`].
//!
//! Every feature is computed twice over, once per low-pass branch: the primary
//! branch (5 kHz) yields SPL, HNR, CPP, spectral slope, Hammarberg index and
//! alpha ratio; the secondary branch (2 kHz) yields HNR, CPP and slope. Both
//! branches filter the original signal.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dsp::{
    self, cepstrum_with_floor, fit_line, fit_line_equidistant, welch_psd, AcfMode, CepstrumSeries,
    FirLowpass, LineFit, SpectralEstimate, WelchConfig, DB_FLOOR,
    DEFAULT_STOPBAND_ATTENUATION_DB,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::{FeatureVector, Signal, REFERENCE_PRESSURE};

/// Lower end of the HNR lag search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HnrMargin {
    /// A fixed number of lag samples, independent of the sample rate.
    Samples(usize),
    /// A fixed time; converted to `round(seconds · fs)` lags.
    Seconds(f64),
}

impl Default for HnrMargin {
    fn default() -> Self {
        Self::Samples(300)
    }
}

impl HnrMargin {
    pub fn lags(self, sample_rate: f64) -> usize {
        match self {
            Self::Samples(n) => n,
            Self::Seconds(s) => (s * sample_rate).round().max(0.0) as usize,
        }
    }
}

impl fmt::Display for HnrMargin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Samples(n) => write!(f, "{n}"),
            Self::Seconds(s) => write!(f, "{}ms", s * 1e3),
        }
    }
}

/// Accepts a bare sample count (`300`) or a time with unit (`4.08ms`, `0.004s`).
impl FromStr for HnrMargin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::InvalidParameter(format!("unrecognised HNR margin {s:?}"));
        if let Some(ms) = t.strip_suffix("ms") {
            ms.trim().parse::<f64>().map(|v| Self::Seconds(v * 1e-3)).map_err(|_| bad())
        } else if let Some(sec) = t.strip_suffix('s') {
            sec.trim().parse::<f64>().map(Self::Seconds).map_err(|_| bad())
        } else {
            t.parse::<usize>().map(Self::Samples).map_err(|_| bad())
        }
    }
}

/// Parameters of the feature extraction. Frequencies in Hz, quefrencies in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub hnr_margin: HnrMargin,
    /// End handling of the HNR autocorrelation. The circular form has no
    /// `1 - τ/N` taper, which otherwise caps the measurable HNR of a 1 s
    /// record near 22 dB.
    pub hnr_acf: AcfMode,
    /// The cepstral regression line covers quefrencies above this value.
    pub cpp_fit_min_quefrency: f64,
    /// Upper end of the cepstral peak search (the lower end is the fit minimum).
    pub cpp_search_max_quefrency: f64,
    /// Width of the moving average applied to the cepstral power before the
    /// peak is measured; 0 disables smoothing.
    pub cpp_smoothing_quefrency: f64,
    /// Restrict the spectrum entering the cepstrum to the branch cutoff, so the
    /// filter stopband does not dominate the dB spectrum.
    pub cpp_limit_to_cutoff: bool,
    pub cepstrum_db_floor: f64,
    pub hbi_pivot: f64,
    pub hbi_max: f64,
    pub alpha_start: f64,
    pub alpha_pivot: f64,
    pub alpha_max: f64,
    pub lp_primary: f64,
    pub lp_secondary: f64,
    pub lp_attenuation_db: f64,
    pub welch: WelchConfig,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            hnr_margin: HnrMargin::default(),
            hnr_acf: AcfMode::Circular,
            cpp_fit_min_quefrency: 1e-3,
            cpp_search_max_quefrency: 20e-3,
            cpp_smoothing_quefrency: 1e-3,
            cpp_limit_to_cutoff: true,
            cepstrum_db_floor: DB_FLOOR,
            hbi_pivot: 2000.0,
            hbi_max: 5000.0,
            alpha_start: 50.0,
            alpha_pivot: 1000.0,
            alpha_max: 5000.0,
            lp_primary: 5000.0,
            lp_secondary: 2000.0,
            lp_attenuation_db: DEFAULT_STOPBAND_ATTENUATION_DB,
            welch: WelchConfig::default(),
        }
    }
}

impl FeatureConfig {
    /// Checks every frequency against `(0, fs/2)` and the band orderings.
    pub fn validate(&self, sample_rate: f64) -> Result<()> {
        let nyquist = sample_rate / 2.0;
        let freqs = [
            ("hbi_pivot", self.hbi_pivot),
            ("hbi_max", self.hbi_max),
            ("alpha_start", self.alpha_start),
            ("alpha_pivot", self.alpha_pivot),
            ("alpha_max", self.alpha_max),
            ("lp_primary", self.lp_primary),
            ("lp_secondary", self.lp_secondary),
        ];
        for (name, f) in freqs {
            if !(f > 0.0 && f < nyquist) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {f} Hz must lie in (0, {nyquist}) Hz"
                )));
            }
        }
        if !(self.alpha_start < self.alpha_pivot && self.alpha_pivot < self.alpha_max) {
            return Err(Error::InvalidParameter(
                "alpha ratio bands need alpha_start < alpha_pivot < alpha_max".into(),
            ));
        }
        if self.hbi_pivot >= self.hbi_max {
            return Err(Error::InvalidParameter(
                "Hammarberg bands need hbi_pivot < hbi_max".into(),
            ));
        }
        if self.hnr_margin.lags(sample_rate) == 0 {
            return Err(Error::InvalidParameter("HNR margin must be positive".into()));
        }
        if !(self.cpp_fit_min_quefrency > 0.0
            && self.cpp_search_max_quefrency > self.cpp_fit_min_quefrency)
        {
            return Err(Error::InvalidParameter(
                "CPP quefrency bounds need 0 < fit minimum < search maximum".into(),
            ));
        }
        if !(self.cpp_smoothing_quefrency >= 0.0) {
            return Err(Error::InvalidParameter(
                "CPP smoothing width must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Sound pressure level `20·log10(RMS / 20 µPa)`.
pub fn spl<T: Scalar>(signal: &Signal<T>) -> Result<T> {
    signal.require_nonempty()?;
    let ms = signal.energy() / T::from_usize_lossy(signal.len());
    if !(ms > T::zero()) {
        return Err(Error::Degenerate("SPL of an all-zero signal".into()));
    }
    Ok(T::lit(20.0) * (ms.sqrt() / T::lit(REFERENCE_PRESSURE)).log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HnrDetail<T> {
    pub hnr_db: T,
    /// Lag of the autocorrelation maximum in samples.
    pub peak_lag: usize,
    pub peak_value: T,
    pub energy: T,
}

/// Harmonics-to-noise ratio `10·log10(r_max / (r(0) − r_max))` in dB, with
/// `r_max` the autocorrelation maximum over lags from the margin on.
pub fn hnr<T: Scalar>(signal: &Signal<T>, cfg: &FeatureConfig) -> Result<T> {
    hnr_detail(signal, cfg).map(|d| d.hnr_db)
}

pub fn hnr_detail<T: Scalar>(signal: &Signal<T>, cfg: &FeatureConfig) -> Result<HnrDetail<T>> {
    signal.require_nonempty()?;
    let n = signal.len();
    let margin = cfg.hnr_margin.lags(signal.sample_rate().to_f64_lossy());
    if margin == 0 {
        return Err(Error::InvalidParameter("HNR margin must be positive".into()));
    }
    if n <= margin {
        return Err(Error::InvalidParameter(format!(
            "signal of {n} samples is not longer than the HNR margin of {margin} lags"
        )));
    }
    let acf = dsp::autocorrelation_with(signal, cfg.hnr_acf)?;
    dsp::acf::require_energy(&acf)?;
    // a circular ACF is mirror-symmetric about N/2
    let last = match cfg.hnr_acf {
        AcfMode::ZeroPadded => n - 1,
        AcfMode::Circular => n / 2,
    };
    let (peak_lag, peak_value) = acf.max_in(margin, last).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "HNR lag window [{margin}, {last}] is empty for {n} samples"
        ))
    })?;
    let energy = acf.energy();
    if peak_value >= energy {
        return Err(Error::Degenerate(format!(
            "autocorrelation at lag {peak_lag} reaches the zero-lag energy"
        )));
    }
    if !(peak_value > T::zero()) {
        return Err(Error::Degenerate(
            "no positive autocorrelation beyond the HNR margin".into(),
        ));
    }
    Ok(HnrDetail {
        hnr_db: T::lit(10.0) * (peak_value / (energy - peak_value)).log10(),
        peak_lag,
        peak_value,
        energy,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CppDetail<T> {
    pub cpp_db: T,
    /// Quefrency of the cepstral peak in seconds.
    pub peak_quefrency: T,
    pub peak_db: T,
    /// Regression of the cepstrum (dB) against quefrency (s).
    pub slope: T,
    pub intercept: T,
    /// Highest spectral frequency entering the cepstrum.
    pub max_frequency: T,
}

/// Cepstral peak prominence over the full Welch spectrum.
pub fn cpp<T: Scalar>(signal: &Signal<T>, cfg: &FeatureConfig) -> Result<T> {
    cpp_detail(signal, cfg, None).map(|d| d.cpp_db)
}

/// Cepstral peak prominence; `band_limit` restricts the spectrum to bins at or
/// below the given frequency before the cepstrum is taken.
pub fn cpp_detail<T: Scalar>(
    signal: &Signal<T>,
    cfg: &FeatureConfig,
    band_limit: Option<f64>,
) -> Result<CppDetail<T>> {
    let spec = welch_psd(signal, &cfg.welch)?;
    let spec = match band_limit {
        Some(hz) => spec.band_limited(T::lit(hz))?,
        None => spec,
    };
    cpp_from_spectrum(&spec, cfg)
}

pub fn cpp_from_spectrum<T: Scalar>(
    spec: &SpectralEstimate<T>,
    cfg: &FeatureConfig,
) -> Result<CppDetail<T>> {
    let ceps = cepstrum_with_floor(spec, T::lit(cfg.cepstrum_db_floor))?;
    let ceps = ceps.smoothed(T::lit(cfg.cpp_smoothing_quefrency));
    cpp_from_cepstrum(&ceps, cfg, spec.max_frequency())
}

fn cpp_from_cepstrum<T: Scalar>(
    ceps: &CepstrumSeries<T>,
    cfg: &FeatureConfig,
    max_frequency: T,
) -> Result<CppDetail<T>> {
    let last = ceps.len() - 1;
    let fit_min = T::lit(cfg.cpp_fit_min_quefrency);
    let search_max = T::lit(cfg.cpp_search_max_quefrency);
    let mut first = ceps.first_bin_at_least(fit_min);
    if first < ceps.len() && ceps.quefrency(first) <= fit_min {
        first += 1;
    }
    let search_last = ((search_max / ceps.quefrency_step()).floor().to_usize().unwrap_or(0)).min(last);
    if first > search_last {
        return Err(Error::InvalidParameter(format!(
            "CPP search window ({} s, {} s] holds no quefrency bin (step {} s)",
            cfg.cpp_fit_min_quefrency,
            cfg.cpp_search_max_quefrency,
            ceps.quefrency_step()
        )));
    }
    let c = ceps.values();
    if last - first + 1 < 2 {
        return Err(Error::InvalidParameter(
            "CPP regression needs at least two quefrency bins".into(),
        ));
    }
    let q: Vec<T> = (first..=last).map(|i| ceps.quefrency(i)).collect();
    let line: LineFit<T> = fit_line(&q, &c[first..=last])?;

    // highest local maximum; a monotone window falls back to its maximum
    let is_local_max = |i: usize| {
        let left = i == 0 || c[i] > c[i - 1];
        let right = i == last || c[i] >= c[i + 1];
        left && right
    };
    let argmax = |it: &mut dyn Iterator<Item = usize>| {
        it.fold(None, |best: Option<usize>, i| match best {
            Some(b) if c[b] >= c[i] => Some(b),
            _ => Some(i),
        })
    };
    let peak = argmax(&mut (first..=search_last).filter(|&i| is_local_max(i)))
        .or_else(|| argmax(&mut (first..=search_last)))
        .expect("nonempty search window");
    let peak_quefrency = ceps.quefrency(peak);
    Ok(CppDetail {
        cpp_db: c[peak] - line.eval(peak_quefrency),
        peak_quefrency,
        peak_db: c[peak],
        slope: line.slope,
        intercept: line.intercept,
        max_frequency,
    })
}

/// Slope of the least-squares line through the linear magnitudes over the
/// whole spectrum, per Hz. Uses the closed-form abscissa sums for the bin index.
pub fn spectral_slope<T: Scalar>(spec: &SpectralEstimate<T>) -> Result<T> {
    let fit = fit_line_equidistant(spec.magnitudes())?;
    Ok(fit.slope / spec.bin_hz())
}

fn band_bins<T: Scalar>(
    spec: &SpectralEstimate<T>,
    start: Option<f64>,
    pivot: f64,
    max: f64,
) -> Result<(usize, usize, usize)> {
    if spec.max_frequency() < T::lit(max) {
        return Err(Error::InvalidParameter(format!(
            "spectrum ends at {} Hz, below the {max} Hz band edge",
            spec.max_frequency()
        )));
    }
    let k_start = match start {
        Some(hz) => spec.lowest_bin_at_least(T::lit(hz)),
        None => Some(1),
    };
    let k_pivot = spec.highest_bin_at_most(T::lit(pivot));
    let k_max = spec.highest_bin_at_most(T::lit(max));
    match (k_start, k_pivot, k_max) {
        (Some(s), Some(p), Some(m)) if s <= p && p < m => Ok((s, p, m)),
        _ => Err(Error::InvalidParameter(format!(
            "bin spacing {} Hz leaves an empty band below {pivot} Hz or up to {max} Hz",
            spec.bin_hz()
        ))),
    }
}

/// Linear Hammarberg ratio: strongest bin in `(0, pivot]` over strongest in `(pivot, max]`.
pub fn hammarberg_ratio<T: Scalar>(
    spec: &SpectralEstimate<T>,
    pivot: f64,
    max: f64,
) -> Result<T> {
    let (k_start, k_pivot, k_max) = band_bins(spec, None, pivot, max)?;
    let m = spec.magnitudes();
    let peak = |r: &[T]| r.iter().copied().fold(T::zero(), T::max);
    let low = peak(&m[k_start..=k_pivot]);
    let high = peak(&m[k_pivot + 1..=k_max]);
    if !(high > T::zero()) {
        return Err(Error::Degenerate(format!(
            "no spectral energy between {pivot} and {max} Hz"
        )));
    }
    if !(low > T::zero()) {
        return Err(Error::Degenerate(format!("no spectral energy below {pivot} Hz")));
    }
    Ok(low / high)
}

/// Hammarberg index in dB (`20·log10` of [`hammarberg_ratio`]).
pub fn hammarberg_index<T: Scalar>(spec: &SpectralEstimate<T>, cfg: &FeatureConfig) -> Result<T> {
    hammarberg_ratio(spec, cfg.hbi_pivot, cfg.hbi_max).map(|r| T::lit(20.0) * r.log10())
}

/// Linear alpha ratio: magnitude sum over `[start, pivot]` over the sum in `(pivot, max]`.
///
/// `k_start` is the lowest bin at or above `start`, `k_pivot` the highest bin
/// at or below `pivot`, `k_max` the highest bin at or below `max`.
pub fn alpha_ratio_linear<T: Scalar>(
    spec: &SpectralEstimate<T>,
    start: f64,
    pivot: f64,
    max: f64,
) -> Result<T> {
    let (k_start, k_pivot, k_max) = band_bins(spec, Some(start), pivot, max)?;
    let m = spec.magnitudes();
    let low: T = m[k_start..=k_pivot].iter().copied().sum();
    let high: T = m[k_pivot + 1..=k_max].iter().copied().sum();
    if !(high > T::zero()) {
        return Err(Error::Degenerate(format!(
            "no spectral energy between {pivot} and {max} Hz"
        )));
    }
    if !(low > T::zero()) {
        return Err(Error::Degenerate(format!(
            "no spectral energy between {start} and {pivot} Hz"
        )));
    }
    Ok(low / high)
}

/// Alpha ratio in dB (`20·log10` of [`alpha_ratio_linear`]).
pub fn alpha_ratio<T: Scalar>(spec: &SpectralEstimate<T>, cfg: &FeatureConfig) -> Result<T> {
    alpha_ratio_linear(spec, cfg.alpha_start, cfg.alpha_pivot, cfg.alpha_max)
        .map(|r| T::lit(20.0) * r.log10())
}

/// Intermediate values behind one extracted feature vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureDiagnostics<T> {
    pub features: FeatureVector<T>,
    pub hnr_5k: HnrDetail<T>,
    pub hnr_2k: HnrDetail<T>,
    pub cpp_5k: CppDetail<T>,
    pub cpp_2k: CppDetail<T>,
    pub hbi_linear: T,
    pub alpha_linear: T,
    pub bin_hz: T,
}

/// Computes the nine-feature vector. Failures carry the feature name.
pub fn extract_features<T: Scalar>(
    signal: &Signal<T>,
    cfg: &FeatureConfig,
) -> Result<FeatureVector<T>> {
    extract_features_detailed(signal, cfg).map(|d| d.features)
}

pub fn extract_features_detailed<T: Scalar>(
    signal: &Signal<T>,
    cfg: &FeatureConfig,
) -> Result<FeatureDiagnostics<T>> {
    signal.require_nonempty()?;
    let fs = signal.sample_rate().to_f64_lossy();
    cfg.validate(fs)?;

    let filter = |cutoff: f64, name: &'static str| {
        FirLowpass::design(cutoff, fs, cfg.lp_attenuation_db)
            .and_then(|f| f.apply(signal))
            .map_err(|e| e.in_feature(name))
    };
    let band = |cutoff: f64| cfg.cpp_limit_to_cutoff.then_some(cutoff);

    let p5 = filter(cfg.lp_primary, "lowpass_5k")?;
    let p2 = filter(cfg.lp_secondary, "lowpass_2k")?;

    let spl_5k = spl(&p5).map_err(|e| e.in_feature("spl_5k"))?;
    let hnr_5k = hnr_detail(&p5, cfg).map_err(|e| e.in_feature("hnr_5k"))?;
    let hnr_2k = hnr_detail(&p2, cfg).map_err(|e| e.in_feature("hnr_2k"))?;

    let spec5 = welch_psd(&p5, &cfg.welch).map_err(|e| e.in_feature("spectrum_5k"))?;
    let spec2 = welch_psd(&p2, &cfg.welch).map_err(|e| e.in_feature("spectrum_2k"))?;
    let limited = |spec: &SpectralEstimate<T>, cutoff: Option<f64>| match cutoff {
        Some(hz) => spec.band_limited(T::lit(hz)),
        None => Ok(spec.clone()),
    };
    let cpp_5k = limited(&spec5, band(cfg.lp_primary))
        .and_then(|s| cpp_from_spectrum(&s, cfg))
        .map_err(|e| e.in_feature("cpp_5k"))?;
    let cpp_2k = limited(&spec2, band(cfg.lp_secondary))
        .and_then(|s| cpp_from_spectrum(&s, cfg))
        .map_err(|e| e.in_feature("cpp_2k"))?;

    let slope_5k = spectral_slope(&spec5).map_err(|e| e.in_feature("slope_5k"))?;
    let slope_2k = spectral_slope(&spec2).map_err(|e| e.in_feature("slope_2k"))?;
    let hbi_linear = hammarberg_ratio(&spec5, cfg.hbi_pivot, cfg.hbi_max)
        .map_err(|e| e.in_feature("hbi_5k"))?;
    let alpha_linear = alpha_ratio_linear(&spec5, cfg.alpha_start, cfg.alpha_pivot, cfg.alpha_max)
        .map_err(|e| e.in_feature("alpha_5k"))?;
    let db = |r: T| T::lit(20.0) * r.log10();

    let features = FeatureVector {
        spl_5k,
        hnr_5k: hnr_5k.hnr_db,
        hnr_2k: hnr_2k.hnr_db,
        cpp_5k: cpp_5k.cpp_db,
        cpp_2k: cpp_2k.cpp_db,
        slope_5k,
        slope_2k,
        hbi_5k: db(hbi_linear),
        alpha_5k: db(alpha_linear),
    };
    Ok(FeatureDiagnostics {
        features,
        hnr_5k,
        hnr_2k,
        cpp_5k,
        cpp_2k,
        hbi_linear,
        alpha_linear,
        bin_hz: spec5.bin_hz(),
    })
}
