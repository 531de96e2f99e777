//! Binary classification of users: Gaussian naive Bayes, a weighted random
//! forest, stratified k-fold cross-validation and support-weighted metrics.
//!
//! Labels are class indices `0` and `1`.

mod cv;
mod dataset;
mod forest;
mod metrics;
mod nb;

pub use cv::{cross_validate, stratified_kfold, CvReport, ModelSpec, Summary, EVAL_HEADER};
pub use dataset::{class_weights, Dataset};
pub use forest::{DecisionTree, ForestParams, Node, RandomForest};
pub use metrics::{evaluate, ClassMetrics, Metrics};
pub use nb::{GaussianNb, VARIANCE_FLOOR};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnError {
    #[error("only one class present")]
    SingleClass,
    #[error("class {class} has {count} member(s), fewer than k = {k}")]
    TooFewSamplesPerClass { class: usize, count: usize, k: usize },
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    EmptyInput,
    #[error("non-finite value at row {row}, feature {feature}")]
    NonFinite { row: usize, feature: usize },
    #[error("label {0} is not 0 or 1")]
    InvalidLabel(usize),
    #[error("expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("model file: {0}")]
    Format(String),
}

pub const MODEL_FORMAT: &str = "exagg-model";
pub const MODEL_VERSION: u32 = 1;

/// Any trained classifier, serializable to versioned JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    NaiveBayes(GaussianNb),
    Forest(RandomForest),
}

impl Model {
    pub fn predict(&self, rows: &[Vec<f64>]) -> Vec<usize> {
        match self {
            Model::NaiveBayes(m) => m.predict(rows),
            Model::Forest(m) => m.predict(rows),
        }
    }

    pub fn to_json(&self) -> String {
        let envelope = serde_json::json!({
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "model": self,
        });
        serde_json::to_string_pretty(&envelope).expect("models serialize") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Model, LearnError> {
        #[derive(Deserialize)]
        struct Envelope {
            format: String,
            version: u32,
            model: Model,
        }
        let env: Envelope = serde_json::from_str(text).map_err(|e| LearnError::Format(e.to_string()))?;
        if env.format != MODEL_FORMAT {
            return Err(LearnError::Format(format!("unexpected format `{}`", env.format)));
        }
        if env.version != MODEL_VERSION {
            return Err(LearnError::Format(format!("unsupported version {}", env.version)));
        }
        Ok(env.model)
    }
}
