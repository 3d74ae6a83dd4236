//! Domain types: pressure signals, configuration labels and feature vectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sample rate of the reference simulation data: one sample every 13.6 µs,
/// rounded to the nearest hertz.
pub const REFERENCE_SAMPLE_RATE: f64 = 73_529.0;

/// Acoustic reference pressure, 20 µPa.
pub const REFERENCE_PRESSURE: f64 = 20e-6;

/// A uniformly sampled acoustic pressure series in pascal.
///
/// Construction validates that the sample rate is positive and every sample
/// is finite. The value is immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    samples: Vec<T>,
    sample_rate: T,
}

impl<T: Scalar> Signal<T> {
    pub fn new(samples: Vec<T>, sample_rate: T) -> Result<Self> {
        if !(sample_rate > T::zero()) || !sample_rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive and finite, got {sample_rate}"
            )));
        }
        if let Some(index) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn sample_rate(&self) -> T {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn nyquist(&self) -> T {
        self.sample_rate / T::lit(2.0)
    }

    pub fn duration(&self) -> T {
        T::from_usize_lossy(self.samples.len()) / self.sample_rate
    }

    /// Sum of squared samples.
    pub fn energy(&self) -> T {
        self.samples.iter().map(|&s| s * s).sum()
    }

    /// Returns a signal with the same sample rate and new samples.
    pub(crate) fn with_samples(&self, samples: Vec<T>) -> Self {
        Self {
            samples,
            sample_rate: self.sample_rate,
        }
    }

    pub fn scaled(&self, factor: T) -> Self {
        self.with_samples(self.samples.iter().map(|&s| s * factor).collect())
    }

    /// Converts to another scalar precision.
    pub fn cast<U: Scalar>(&self) -> Signal<U> {
        Signal {
            samples: self
                .samples
                .iter()
                .map(|&s| U::lit(s.to_f64_lossy()))
                .collect(),
            sample_rate: U::lit(self.sample_rate.to_f64_lossy()),
        }
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.samples.is_empty() {
            Err(Error::EmptySignal)
        } else {
            Ok(())
        }
    }
}

/// Subglottal (driving) pressure of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SubglottalPressure {
    Low,
    Normal,
    High,
}

impl SubglottalPressure {
    pub const ALL: [SubglottalPressure; 3] = [Self::Low, Self::Normal, Self::High];

    pub fn pascal(self) -> u32 {
        match self {
            Self::Low => 385,
            Self::Normal => 775,
            Self::High => 1500,
        }
    }

    pub fn from_pascal(pa: i64) -> Result<Self> {
        match pa {
            385 => Ok(Self::Low),
            775 => Ok(Self::Normal),
            1500 => Ok(Self::High),
            other => Err(Error::LabelOutOfRange {
                field: "pressure_pa",
                value: other.to_string(),
            }),
        }
    }
}

/// Glottal closure type, GC1 (complete closure) to GC4 (no contact).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GlottalClosure {
    Gc1,
    Gc2,
    Gc3,
    Gc4,
}

impl GlottalClosure {
    pub const ALL: [GlottalClosure; 4] = [Self::Gc1, Self::Gc2, Self::Gc3, Self::Gc4];

    pub fn index(self) -> u8 {
        match self {
            Self::Gc1 => 1,
            Self::Gc2 => 2,
            Self::Gc3 => 3,
            Self::Gc4 => 4,
        }
    }

    /// Fraction of the vocal fold length that stays open, in percent.
    pub fn initial_opening_percent(self) -> u32 {
        match self {
            Self::Gc1 => 0,
            Self::Gc2 => 40,
            Self::Gc3 => 70,
            Self::Gc4 => 100,
        }
    }

    pub fn from_index(i: i64) -> Result<Self> {
        match i {
            1 => Ok(Self::Gc1),
            2 => Ok(Self::Gc2),
            3 => Ok(Self::Gc3),
            4 => Ok(Self::Gc4),
            other => Err(Error::LabelOutOfRange {
                field: "gc_type",
                value: other.to_string(),
            }),
        }
    }
}

/// Vocal fold motion symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symmetry {
    Asymmetric,
    Symmetric,
}

impl Symmetry {
    pub const ALL: [Symmetry; 2] = [Self::Asymmetric, Self::Symmetric];

    pub fn code(self) -> u8 {
        match self {
            Self::Asymmetric => 0,
            Self::Symmetric => 1,
        }
    }

    pub fn from_code(c: i64) -> Result<Self> {
        match c {
            0 => Ok(Self::Asymmetric),
            1 => Ok(Self::Symmetric),
            other => Err(Error::LabelOutOfRange {
                field: "symmetry",
                value: other.to_string(),
            }),
        }
    }
}

/// The label triple of one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelVector {
    pub pressure: SubglottalPressure,
    pub gc: GlottalClosure,
    pub symmetry: Symmetry,
}

impl LabelVector {
    pub fn new(pressure: SubglottalPressure, gc: GlottalClosure, symmetry: Symmetry) -> Self {
        Self {
            pressure,
            gc,
            symmetry,
        }
    }

    /// Builds a label from raw numeric values, rejecting anything outside the closed sets.
    pub fn from_raw(pressure_pa: i64, gc_type: i64, symmetry: i64) -> Result<Self> {
        Ok(Self {
            pressure: SubglottalPressure::from_pascal(pressure_pa)?,
            gc: GlottalClosure::from_index(gc_type)?,
            symmetry: Symmetry::from_code(symmetry)?,
        })
    }

    /// Numeric class id of one label dimension (pressure in Pa, GC 1–4, symmetry 0/1).
    pub fn value(&self, kind: LabelKind) -> i64 {
        match kind {
            LabelKind::Pressure => i64::from(self.pressure.pascal()),
            LabelKind::Gc => i64::from(self.gc.index()),
            LabelKind::Symmetry => i64::from(self.symmetry.code()),
        }
    }

    /// The full 3×4×2 factorial design in pressure-major order.
    pub fn factorial() -> Vec<LabelVector> {
        let mut out = Vec::with_capacity(24);
        for p in SubglottalPressure::ALL {
            for gc in GlottalClosure::ALL {
                for s in Symmetry::ALL {
                    out.push(LabelVector::new(p, gc, s));
                }
            }
        }
        out
    }
}

/// Selects one element of the label vector; classes are formed per element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Pressure,
    Gc,
    Symmetry,
}

impl LabelKind {
    pub const ALL: [LabelKind; 3] = [Self::Pressure, Self::Gc, Self::Symmetry];

    pub fn column_name(self) -> &'static str {
        match self {
            Self::Pressure => "pressure_pa",
            Self::Gc => "gc_type",
            Self::Symmetry => "symmetry",
        }
    }

    /// Number of distinct values in the label set.
    pub fn cardinality(self) -> usize {
        match self {
            Self::Pressure => 3,
            Self::Gc => 4,
            Self::Symmetry => 2,
        }
    }
}

impl fmt::Display for LabelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pressure => "pressure",
            Self::Gc => "gc",
            Self::Symmetry => "symmetry",
        })
    }
}

impl FromStr for LabelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pressure" | "pressure_pa" | "subglottal_pressure" => Ok(Self::Pressure),
            "gc" | "gc_type" | "glottal_closure" => Ok(Self::Gc),
            "symmetry" | "sym" => Ok(Self::Symmetry),
            other => Err(Error::InvalidParameter(format!("unknown label {other:?}"))),
        }
    }
}

/// One row of a configuration manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigRecord {
    pub id: String,
    pub signal_path: std::path::PathBuf,
    pub label: LabelVector,
}

/// Names of the nine features, in vector order.
pub const FEATURE_NAMES: [&str; 9] = [
    "spl_5k", "hnr_5k", "hnr_2k", "cpp_5k", "cpp_2k", "slope_5k", "slope_2k", "hbi_5k", "alpha_5k",
];

/// The nine acoustic features of one configuration.
///
/// SPL, HNR, CPP, HBI and alpha ratio are in dB. Slopes are in
/// magnitude units per Hz of the fitted linear spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector<T> {
    pub spl_5k: T,
    pub hnr_5k: T,
    pub hnr_2k: T,
    pub cpp_5k: T,
    pub cpp_2k: T,
    pub slope_5k: T,
    pub slope_2k: T,
    pub hbi_5k: T,
    pub alpha_5k: T,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn to_array(&self) -> [T; 9] {
        [
            self.spl_5k,
            self.hnr_5k,
            self.hnr_2k,
            self.cpp_5k,
            self.cpp_2k,
            self.slope_5k,
            self.slope_2k,
            self.hbi_5k,
            self.alpha_5k,
        ]
    }

    pub fn from_array(a: [T; 9]) -> Self {
        let [spl_5k, hnr_5k, hnr_2k, cpp_5k, cpp_2k, slope_5k, slope_2k, hbi_5k, alpha_5k] = a;
        Self {
            spl_5k,
            hnr_5k,
            hnr_2k,
            cpp_5k,
            cpp_2k,
            slope_5k,
            slope_2k,
            hbi_5k,
            alpha_5k,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_rejects_nan_and_bad_rate() {
        assert!(matches!(
            Signal::new(vec![0.0, f64::NAN], 10.0),
            Err(Error::NonFiniteSample { index: 1 })
        ));
        assert!(Signal::new(vec![0.0], 0.0).is_err());
        assert!(Signal::new(vec![0.0], -1.0).is_err());
    }

    #[test]
    fn factorial_design_has_24_unique_labels() {
        let labels = LabelVector::factorial();
        assert_eq!(labels.len(), 24);
        let unique: std::collections::HashSet<_> = labels.iter().collect();
        assert_eq!(unique.len(), 24);
        assert_eq!(labels[0].value(LabelKind::Pressure), 385);
        assert_eq!(labels[0].value(LabelKind::Gc), 1);
        assert_eq!(labels[0].value(LabelKind::Symmetry), 0);
    }

    #[test]
    fn label_sets_are_closed() {
        assert!(LabelVector::from_raw(500, 1, 0).is_err());
        assert!(LabelVector::from_raw(385, 5, 0).is_err());
        assert!(LabelVector::from_raw(385, 1, 2).is_err());
        assert!(LabelVector::from_raw(1500, 4, 1).is_ok());
    }

    #[test]
    fn feature_array_roundtrip() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0];
        assert_eq!(FeatureVector::from_array(a).to_array(), a);
    }
}
