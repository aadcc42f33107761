//! Online estimators sharing one update/predict contract.
//!
//! Every estimator starts from the zero function. Predictions always use the
//! Polyak-averaged iterate; the raw SGD trajectory only drives the updates.

mod batch;
mod kernel;
mod parametric;
mod schedule;
mod sieve;

use serde::{Deserialize, Serialize};

pub use batch::{batch_sieve_fit, BatchSieveEstimate};
pub use kernel::{
    shared_kernel_row, CountingKernel, GaussianKernel, Kernel, KernelCoefficients, KernelSgd,
};
pub use parametric::ParametricSgd;
pub use schedule::{ScheduleSieve, ShrinkageIndex, StepSchedule};
pub use sieve::SieveSgd;

use crate::error::{check_dimension, Error, Result};
use crate::sample::Sample;

/// Any coefficient beyond this magnitude is treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

pub trait Predictor {
    fn dimension(&self) -> usize;

    fn predict(&self, x: &[f64]) -> Result<f64>;
}

/// An estimator updated one sample at a time.
pub trait OnlineEstimator: Predictor + Send {
    /// Number of samples consumed so far.
    fn samples_seen(&self) -> u64;

    fn update(&mut self, sample: &Sample) -> Result<()>;

    /// Prediction of the current (pre-update) estimate at `sample.x`,
    /// followed by the update. Implementations may share work between the two.
    fn predict_then_update(&mut self, sample: &Sample) -> Result<f64> {
        let prediction = self.predict(&sample.x)?;
        self.update(sample)?;
        Ok(prediction)
    }
}

/// Predicts a fixed value and ignores every sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantPredictor {
    pub dimension: usize,
    pub value: f64,
    #[serde(default)]
    pub seen: u64,
}

impl ConstantPredictor {
    pub fn new(dimension: usize, value: f64) -> Self {
        Self {
            dimension,
            value,
            seen: 0,
        }
    }
}

impl Predictor for ConstantPredictor {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        check_dimension(self.dimension, x.len())?;
        Ok(self.value)
    }
}

impl OnlineEstimator for ConstantPredictor {
    fn samples_seen(&self) -> u64 {
        self.seen
    }

    fn update(&mut self, sample: &Sample) -> Result<()> {
        check_dimension(self.dimension, sample.dimension())?;
        self.seen += 1;
        Ok(())
    }
}

/// Closed set of estimator families, serializable for checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Estimator {
    Sieve(SieveSgd),
    Kernel(KernelSgd<GaussianKernel>),
    Parametric(ParametricSgd),
    Constant(ConstantPredictor),
}

impl Predictor for Estimator {
    fn dimension(&self) -> usize {
        match self {
            Estimator::Sieve(e) => e.dimension(),
            Estimator::Kernel(e) => e.dimension(),
            Estimator::Parametric(e) => e.dimension(),
            Estimator::Constant(e) => e.dimension(),
        }
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        match self {
            Estimator::Sieve(e) => e.predict(x),
            Estimator::Kernel(e) => e.predict(x),
            Estimator::Parametric(e) => e.predict(x),
            Estimator::Constant(e) => e.predict(x),
        }
    }
}

impl OnlineEstimator for Estimator {
    fn samples_seen(&self) -> u64 {
        match self {
            Estimator::Sieve(e) => e.samples_seen(),
            Estimator::Kernel(e) => e.samples_seen(),
            Estimator::Parametric(e) => e.samples_seen(),
            Estimator::Constant(e) => e.samples_seen(),
        }
    }

    fn update(&mut self, sample: &Sample) -> Result<()> {
        match self {
            Estimator::Sieve(e) => e.update(sample),
            Estimator::Kernel(e) => e.update(sample),
            Estimator::Parametric(e) => e.update(sample),
            Estimator::Constant(e) => e.update(sample),
        }
    }

    fn predict_then_update(&mut self, sample: &Sample) -> Result<f64> {
        match self {
            Estimator::Sieve(e) => e.predict_then_update(sample),
            Estimator::Kernel(e) => e.predict_then_update(sample),
            Estimator::Parametric(e) => e.predict_then_update(sample),
            Estimator::Constant(e) => e.predict_then_update(sample),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

pub(crate) fn guard(values: &[f64], step: u64) -> Result<()> {
    if values.iter().all(|v| v.abs() <= DIVERGENCE_LIMIT) {
        Ok(())
    } else {
        Err(Error::NumericOverflow { step })
    }
}

/// `avg <- avg + (value - avg) / i`, the running mean after `i` terms.
pub(crate) fn running_mean(avg: &mut [f64], values: &[f64], i: u64) {
    let inv = 1.0 / i as f64;
    for (a, v) in avg.iter_mut().zip(values) {
        *a += (v - *a) * inv;
    }
}
