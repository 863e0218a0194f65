use thiserror::Error;

/// Errors raised by the detection library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// An iterative evaluation did not reach tolerance within its budget.
    #[error("{op} did not converge within {iterations} iterations")]
    Convergence { op: &'static str, iterations: usize },

    /// Two sequences that must be the same length were not.
    #[error("length mismatch in {op}: {left} vs {right}")]
    LengthMismatch {
        op: &'static str,
        left: usize,
        right: usize,
    },

    /// A decision scheme needed an input the observation did not carry.
    #[error("observation is missing `{0}` required by the selected scheme")]
    MissingContext(&'static str),

    /// Mixture weights failed to sum to one.
    #[error("{which} weights sum to {sum}, expected 1")]
    Normalization { which: &'static str, sum: f64 },

    /// A configuration value violates an invariant.
    #[error("invalid `{field}`: {detail}")]
    InvalidConfig { field: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        op,
        detail: detail.into(),
    }
}

pub(crate) fn invalid(field: &'static str, detail: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field,
        detail: detail.into(),
    }
}
