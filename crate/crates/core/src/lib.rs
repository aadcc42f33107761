//! Online nonparametric regression with weighted rolling validation.
//!
//! Sieve, kernel and parametric SGD estimators share a predict-then-update
//! contract; [`selection::SelectionHarness`] runs a pool of them side by side
//! and tracks the weighted rolling-validation score of each, and
//! [`experiments`] replicates the simulation studies and stability checks.

pub mod basis;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod loss;
pub mod sample;
pub mod selection;

pub use error::{Error, Result};
pub use loss::LossKind;
pub use sample::{LabeledStream, NoiseModel, Sample};
