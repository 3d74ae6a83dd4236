//! Standardise → LDA → SVM chains and their JSON model files.

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::{accuracy, class_set, lda_fit, svm_train, LdaProjection, Matrix, Standardizer};
use crate::ml::{SvmModel, SvmParams};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub standardize: bool,
    /// LDA output dimension; `None` feeds the (standardised) features to the SVM.
    pub lda_dims: Option<usize>,
    pub svm: SvmParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            standardize: true,
            lda_dims: Some(2),
            svm: SvmParams::default(),
        }
    }
}

/// The unsupervised-then-supervised feature map in front of the classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding<T> {
    pub standardizer: Option<Standardizer<T>>,
    pub lda: Option<LdaProjection<T>>,
}

impl<T: Scalar> Embedding<T> {
    /// Fits the map. The LDA dimension is capped at `classes − 1` and `d`.
    pub fn fit(x: &Matrix<T>, y: &[i64], cfg: &PipelineConfig) -> Result<Self> {
        let standardizer = if cfg.standardize {
            Some(Standardizer::fit(x)?)
        } else {
            None
        };
        let xs = match &standardizer {
            Some(s) => s.transform(x)?,
            None => x.clone(),
        };
        let lda = match cfg.lda_dims {
            Some(dims) => {
                let cap = (class_set(y).len().saturating_sub(1)).min(x.cols());
                Some(lda_fit(&xs, y, dims.min(cap).max(1))?)
            }
            None => None,
        };
        Ok(Self { standardizer, lda })
    }

    pub fn transform(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        let xs = match &self.standardizer {
            Some(s) => s.transform(x)?,
            None => x.clone(),
        };
        match &self.lda {
            Some(l) => l.transform(&xs),
            None => Ok(xs),
        }
    }

    pub fn out_dims(&self, in_dims: usize) -> usize {
        self.lda.as_ref().map_or(in_dims, |l| l.out_dims())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipeline<T> {
    pub embedding: Embedding<T>,
    pub svm: SvmModel<T>,
}

impl<T: Scalar> Pipeline<T> {
    pub fn fit(x: &Matrix<T>, y: &[i64], cfg: &PipelineConfig) -> Result<Self> {
        let embedding = Embedding::fit(x, y, cfg)?;
        let z = embedding.transform(x)?;
        let svm = svm_train(&z, y, &cfg.svm)?;
        Ok(Self { embedding, svm })
    }

    /// Fits only the classifier on top of an already fitted embedding.
    pub fn fit_with_embedding(
        embedding: Embedding<T>,
        x: &Matrix<T>,
        y: &[i64],
        params: &SvmParams,
    ) -> Result<Self> {
        let z = embedding.transform(x)?;
        let svm = svm_train(&z, y, params)?;
        Ok(Self { embedding, svm })
    }

    pub fn embed(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        self.embedding.transform(x)
    }

    pub fn predict(&self, x: &Matrix<T>) -> Result<Vec<i64>> {
        self.svm.predict(&self.embed(x)?)
    }

    /// Fraction of correctly classified rows.
    pub fn score(&self, x: &Matrix<T>, y: &[i64]) -> Result<f64> {
        Ok(accuracy(&self.predict(x)?, y))
    }
}

pub const MODEL_FORMAT: &str = "vocalfeat-model";
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Versioned on-disk form of a fitted pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile<T> {
    pub format: String,
    pub version: u32,
    pub target: String,
    pub feature_names: Vec<String>,
    pub config: PipelineConfig,
    pub pipeline: Pipeline<T>,
}

impl<T: Scalar + Serialize + DeserializeOwned> ModelFile<T> {
    pub fn new(
        target: impl Into<String>,
        feature_names: Vec<String>,
        config: PipelineConfig,
        pipeline: Pipeline<T>,
    ) -> Self {
        Self {
            format: MODEL_FORMAT.to_owned(),
            version: MODEL_FORMAT_VERSION,
            target: target.into(),
            feature_names,
            config,
            pipeline,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("model file is not JSON: {e}")))?;
        let format = value.get("format").and_then(|v| v.as_str());
        let version = value.get("version").and_then(|v| v.as_u64());
        if format != Some(MODEL_FORMAT) || version != Some(u64::from(MODEL_FORMAT_VERSION)) {
            return Err(Error::InvalidParameter(format!(
                "unsupported model format {format:?} version {version:?}"
            )));
        }
        serde_json::from_value(value)
            .map_err(|e| Error::InvalidParameter(format!("malformed model file: {e}")))
    }
}
