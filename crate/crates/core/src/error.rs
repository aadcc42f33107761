//! Error type shared by every module of the crate.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configuration value is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A sample with a NaN or infinite entry reached stream ingestion.
    #[error("non-finite value in sample {index}")]
    NonFiniteSample { index: u64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// An estimator iterate left the representable range.
    #[error("numeric overflow at step {step}")]
    NumericOverflow { step: u64 },

    /// Rolling validation was fed a prediction out of order.
    #[error("sequencing error: expected step {expected}, got {found}")]
    Sequencing { expected: u64, found: u64 },

    #[error("empty data")]
    EmptyData,

    /// Failure of one candidate inside a selection run.
    #[error("candidate `{label}`: {source}")]
    Candidate {
        label: String,
        #[source]
        source: Box<Error>,
    },

    /// Failure inside one replicate of an experiment.
    #[error("replicate {replicate}: {source}")]
    Replicate {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Strips `Candidate`/`Replicate` context and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Candidate { source, .. } | Error::Replicate { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_divergence(&self) -> bool {
        matches!(self.root(), Error::NumericOverflow { .. })
    }
}

pub(crate) fn ensure_finite(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidInput(format!("{what} is not finite")))
    }
}

pub(crate) fn check_dimension(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
