use std::path::Path;

use exagg_core::corpus::CorpusError;
use exagg_core::diffusion::DiffusionError;
use exagg_core::learn::LearnError;
use exagg_core::lexicon::LexiconError;
use exagg_core::profiler::ProfileError;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{} invalid input row(s); first: {}", .0.len(), .0[0])]
    InvalidRows(Vec<CorpusError>),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

impl CliError {
    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    /// 1 for failures writing outputs, 2 for anything wrong with the inputs or config.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::InvalidRows(_) | CliError::Corpus(_) => "corpus",
            CliError::Diffusion(_) => "diffusion",
            CliError::Lexicon(_) => "lexicon",
            CliError::Learn(_) => "learn",
            CliError::Profile(_) => "profile",
        }
    }

    /// Details fall back to null rather than failing the error report itself.
    pub fn to_json(&self) -> Value {
        let details = match self {
            CliError::InvalidRows(rows) => serde_json::to_value(rows).unwrap_or(Value::Null),
            CliError::Corpus(e) => serde_json::to_value(e).unwrap_or(Value::Null),
            CliError::Diffusion(e) => serde_json::to_value(e).unwrap_or(Value::Null),
            CliError::Io { path, .. } => json!({ "path": path }),
            _ => Value::Null,
        };
        json!({
            "error": self.kind(),
            "message": self.to_string(),
            "details": details,
        })
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
