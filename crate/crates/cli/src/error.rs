use std::path::PathBuf;

use thiserror::Error;

/// One validation problem, tied to the spec field that caused it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "`{}`: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid spec:{}", .0.iter().map(|d| format!("\n  {d}")).collect::<String>())]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Core(#[from] coopsense::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
