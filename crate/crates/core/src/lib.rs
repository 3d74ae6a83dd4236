//! Acoustic voice-quality features from pressure signals, and the
//! correlation / LDA / SVM analysis built on them.
//!
//! The numeric kernels are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the double-precision types used by the pipeline.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dsp;
pub mod error;
pub mod features;
pub mod io;
pub mod ml;
pub mod scalar;
pub mod signal;
pub mod stats;
pub mod synth;
mod wav;

pub use error::{Error, Result};
pub use features::{extract_features, FeatureConfig};
pub use scalar::Scalar;
pub use signal::{
    ConfigRecord, FeatureVector, GlottalClosure, LabelKind, LabelVector, Signal,
    SubglottalPressure, Symmetry, FEATURE_NAMES, REFERENCE_PRESSURE, REFERENCE_SAMPLE_RATE,
};

pub type PressureSignal = Signal<f64>;
pub type PressureSignal32 = Signal<f32>;
pub type FeatureVector64 = FeatureVector<f64>;
pub type SpectralEstimate64 = dsp::SpectralEstimate<f64>;
pub type AcfSeries64 = dsp::AcfSeries<f64>;
pub type CepstrumSeries64 = dsp::CepstrumSeries<f64>;
pub type Matrix64 = ml::Matrix<f64>;
pub type Pipeline64 = ml::Pipeline<f64>;
