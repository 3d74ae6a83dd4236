//! Signal-processing kernels shared by the features.

pub mod acf;
pub mod cepstrum;
pub mod filter;
pub mod regression;
pub mod welch;

pub(crate) mod fft;

pub use acf::{
    autocorrelation, autocorrelation_direct, autocorrelation_fft, autocorrelation_with,
    circular_autocorrelation, circular_autocorrelation_direct, AcfMode, AcfSeries,
};
pub use cepstrum::{cepstrum, cepstrum_with_floor, CepstrumSeries, DB_FLOOR};
pub use filter::{lowpass, FirLowpass, DEFAULT_STOPBAND_ATTENUATION_DB};
pub use regression::{equidistant_sums, fit_line, fit_line_equidistant, LineFit, RegressionSums};
pub use welch::{default_segment_len, welch_psd, SpectralEstimate, WelchConfig, WindowKind};
