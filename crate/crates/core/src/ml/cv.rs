//! Stratified k-fold cross-validation and hyperparameter sweeps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::{accuracy, class_set, Embedding, Matrix, Pipeline, PipelineConfig};
use crate::scalar::Scalar;
use crate::synth::Prng;

/// Fold index (`0..k`) of every sample.
///
/// Classes are visited in ascending order; the members of each class are
/// shuffled with one seeded generator and dealt round-robin, the counter
/// continuing from class to class. Per-class fold counts therefore differ by
/// at most one, and fold sizes likewise.
pub fn stratified_kfold(y: &[i64], k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = y.len();
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 folds, got {k}")));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "{k} folds requested for {n} samples"
        )));
    }
    let mut prng = Prng::new(seed);
    let mut folds = vec![0usize; n];
    let mut counter = 0usize;
    for c in class_set(y) {
        let mut members: Vec<usize> = (0..n).filter(|&i| y[i] == c).collect();
        prng.shuffle(&mut members);
        for i in members {
            folds[i] = counter % k;
            counter += 1;
        }
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub k: usize,
    pub seed: u64,
    pub pipeline: PipelineConfig,
    /// Fit standardisation and LDA once on all samples before splitting,
    /// instead of inside every training fold.
    pub shared_embedding: bool,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            k: 5,
            seed: 0,
            pipeline: PipelineConfig::default(),
            shared_embedding: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub seed: u64,
    pub shared_embedding: bool,
    pub folds: Vec<usize>,
    pub fold_sizes: Vec<usize>,
    pub fold_accuracies: Vec<f64>,
    /// Mean of the per-fold accuracies.
    pub mean_accuracy: f64,
    /// Held-out prediction of every sample.
    pub predictions: Vec<i64>,
    /// Fraction of held-out predictions that are correct, over all samples.
    pub pooled_accuracy: f64,
    /// Accuracy on all samples of a pipeline fitted to all samples.
    pub training_score: f64,
}

pub fn cross_validate<T: Scalar>(x: &Matrix<T>, y: &[i64], cfg: &CvConfig) -> Result<CvReport> {
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    let folds = stratified_kfold(y, cfg.k, cfg.seed)?;
    cross_validate_with_folds(x, y, folds, cfg)
}

/// Cross-validation over a caller-supplied fold assignment (`folds[i] < cfg.k`).
pub fn cross_validate_with_folds<T: Scalar>(
    x: &Matrix<T>,
    y: &[i64],
    folds: Vec<usize>,
    cfg: &CvConfig,
) -> Result<CvReport> {
    if y.len() != x.rows() || folds.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: if y.len() != x.rows() { y.len() } else { folds.len() },
        });
    }
    if cfg.k < 2 || folds.iter().any(|&f| f >= cfg.k) {
        return Err(Error::InvalidParameter(format!(
            "fold labels must lie in 0..{}",
            cfg.k
        )));
    }
    let shared = if cfg.shared_embedding {
        Some(Embedding::fit(x, y, &cfg.pipeline)?)
    } else {
        None
    };
    let mut predictions = vec![0i64; y.len()];
    let mut fold_sizes = Vec::with_capacity(cfg.k);
    let mut fold_accuracies = Vec::with_capacity(cfg.k);
    for f in 0..cfg.k {
        let train: Vec<usize> = (0..y.len()).filter(|&i| folds[i] != f).collect();
        let test: Vec<usize> = (0..y.len()).filter(|&i| folds[i] == f).collect();
        let (xtr, xte) = (x.select_rows(&train), x.select_rows(&test));
        let ytr: Vec<i64> = train.iter().map(|&i| y[i]).collect();
        let yte: Vec<i64> = test.iter().map(|&i| y[i]).collect();
        let model = match &shared {
            Some(emb) => Pipeline::fit_with_embedding(emb.clone(), &xtr, &ytr, &cfg.pipeline.svm)?,
            None => Pipeline::fit(&xtr, &ytr, &cfg.pipeline)?,
        };
        let pred = model.predict(&xte)?;
        for (&i, &p) in test.iter().zip(&pred) {
            predictions[i] = p;
        }
        fold_sizes.push(test.len());
        fold_accuracies.push(accuracy(&pred, &yte));
    }
    let full = Pipeline::fit(x, y, &cfg.pipeline)?;
    let training_score = full.score(x, y)?;
    Ok(CvReport {
        k: cfg.k,
        seed: cfg.seed,
        shared_embedding: cfg.shared_embedding,
        mean_accuracy: fold_accuracies.iter().sum::<f64>() / cfg.k as f64,
        pooled_accuracy: accuracy(&predictions, y),
        folds,
        fold_sizes,
        fold_accuracies,
        predictions,
        training_score,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub c: f64,
    pub gamma: f64,
    pub training_score: f64,
    pub cv_mean_accuracy: f64,
}

/// Cross-validates every `(C, γ)` pair, C-major.
pub fn sweep<T: Scalar>(
    x: &Matrix<T>,
    y: &[i64],
    cfg: &CvConfig,
    cs: &[f64],
    gammas: &[f64],
) -> Result<Vec<SweepPoint>> {
    let mut out = Vec::with_capacity(cs.len() * gammas.len());
    for &c in cs {
        for &gamma in gammas {
            let mut point_cfg = cfg.clone();
            point_cfg.pipeline.svm.c = c;
            point_cfg.pipeline.svm.gamma = Some(gamma);
            let r = cross_validate(x, y, &point_cfg)?;
            out.push(SweepPoint {
                c,
                gamma,
                training_score: r.training_score,
                cv_mean_accuracy: r.mean_accuracy,
            });
        }
    }
    Ok(out)
}

/// `n` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..n)
                .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
                .collect()
        }
    }
}
