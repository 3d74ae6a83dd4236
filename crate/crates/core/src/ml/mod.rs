//! Standardisation, LDA projection, one-versus-rest RBF-SVM classification,
//! stratified cross-validation and decision-region rasterisation.

pub mod cv;
pub mod grid;
pub mod lda;
pub mod linalg;
mod matrix;
pub mod pipeline;
pub mod standardize;
pub mod svm;

pub use cv::{cross_validate, cross_validate_with_folds, stratified_kfold, sweep, CvConfig, CvReport, SweepPoint};
pub use grid::{decision_grid, decision_strip, Bounds, DecisionGrid};
pub use lda::{lda_fit, lda_transform, LdaProjection};
pub use matrix::Matrix;
pub use pipeline::{Embedding, ModelFile, Pipeline, PipelineConfig, MODEL_FORMAT_VERSION};
pub use standardize::{standardize, Standardizer};
pub use svm::{svm_predict, svm_train, BinaryMachine, SvmModel, SvmParams};

/// Distinct labels in ascending order.
pub fn class_set(y: &[i64]) -> Vec<i64> {
    let mut c = y.to_vec();
    c.sort_unstable();
    c.dedup();
    c
}

/// Fraction of positions where `pred` equals `truth`; 0 for empty input.
pub fn accuracy(pred: &[i64], truth: &[i64]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let hits = pred.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}
