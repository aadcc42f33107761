//! Candidate pools advanced in lockstep by the selection harness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dimension, Error, Result};
use crate::estimators::{Kernel, KernelCoefficients, OnlineEstimator};
use crate::sample::Sample;

/// Failure of the candidate at `index`.
pub type CandidateFailure = (usize, Error);

/// A fixed set of candidates that consume the same stream.
pub trait CandidatePool: Send {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn dimension(&self) -> usize;

    /// Pre-update prediction of every candidate at `sample.x`, then one
    /// update of every candidate with `sample`.
    fn predict_then_update(
        &mut self,
        sample: &Sample,
    ) -> std::result::Result<Vec<f64>, CandidateFailure>;

    /// Prediction of candidate `k` in its current state.
    fn predict(&self, k: usize, x: &[f64]) -> Result<f64>;
}

/// Candidates that share nothing; each is advanced on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependentPool<E> {
    estimators: Vec<E>,
    #[serde(default)]
    parallel: bool,
}

impl<E: OnlineEstimator> IndependentPool<E> {
    pub fn new(estimators: Vec<E>) -> Result<Self> {
        let Some(first) = estimators.first() else {
            return Err(Error::InvalidConfig(
                "pool needs at least one candidate".into(),
            ));
        };
        let p = first.dimension();
        for e in &estimators {
            check_dimension(p, e.dimension())?;
        }
        Ok(Self {
            estimators,
            parallel: false,
        })
    }

    /// Fans each sample out over the rayon pool. Results do not depend on
    /// this setting.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn estimators(&self) -> &[E] {
        &self.estimators
    }

    pub fn into_estimators(self) -> Vec<E> {
        self.estimators
    }
}

impl<E: OnlineEstimator> CandidatePool for IndependentPool<E> {
    fn len(&self) -> usize {
        self.estimators.len()
    }

    fn dimension(&self) -> usize {
        self.estimators[0].dimension()
    }

    fn predict_then_update(
        &mut self,
        sample: &Sample,
    ) -> std::result::Result<Vec<f64>, CandidateFailure> {
        let outcomes: Vec<Result<f64>> = if self.parallel {
            self.estimators
                .par_iter_mut()
                .map(|e| e.predict_then_update(sample))
                .collect()
        } else {
            self.estimators
                .iter_mut()
                .map(|e| e.predict_then_update(sample))
                .collect()
        };
        outcomes
            .into_iter()
            .enumerate()
            .map(|(k, r)| r.map_err(|e| (k, e)))
            .collect()
    }

    fn predict(&self, k: usize, x: &[f64]) -> Result<f64> {
        self.estimators
            .get(k)
            .ok_or_else(|| Error::InvalidInput(format!("no candidate {k}")))?
            .predict(x)
    }
}

/// Kernel-SGD candidates with one kernel and one support list, differing only
/// in their step-size schedules (and loss).
///
/// Each incoming sample is compared against the support once; the resulting
/// row serves every candidate's prediction and update.
#[derive(Debug, Clone)]
pub struct SharedKernelPool<K> {
    kernel: K,
    dimension: usize,
    support: Vec<Vec<f64>>,
    members: Vec<KernelCoefficients>,
}

impl<K: Kernel> SharedKernelPool<K> {
    pub fn new(dimension: usize, kernel: K, members: Vec<KernelCoefficients>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidConfig(
                "pool needs at least one candidate".into(),
            ));
        }
        if members.iter().any(|m| m.samples_seen() != 0) {
            return Err(Error::InvalidConfig(
                "shared kernel pool members must be fresh".into(),
            ));
        }
        Ok(Self {
            kernel,
            dimension,
            support: Vec::new(),
            members,
        })
    }

    pub fn support(&self) -> &[Vec<f64>] {
        &self.support
    }

    pub fn members(&self) -> &[KernelCoefficients] {
        &self.members
    }

    fn row(&self, x: &[f64]) -> Vec<f64> {
        self.support
            .iter()
            .map(|s| self.kernel.eval(s, x))
            .collect()
    }
}

impl<K: Kernel> CandidatePool for SharedKernelPool<K> {
    fn len(&self) -> usize {
        self.members.len()
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn predict_then_update(
        &mut self,
        sample: &Sample,
    ) -> std::result::Result<Vec<f64>, CandidateFailure> {
        check_dimension(self.dimension, sample.dimension()).map_err(|e| (0, e))?;
        let row = self.row(&sample.x);
        let step = self.support.len() as u64 + 1;
        if row.iter().any(|v| !v.is_finite()) {
            return Err((0, Error::NumericOverflow { step }));
        }
        let predictions = self
            .members
            .iter_mut()
            .enumerate()
            .map(|(k, m)| m.step(&row, sample.y).map_err(|e| (k, e)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        self.support.push(sample.x.clone());
        Ok(predictions)
    }

    fn predict(&self, k: usize, x: &[f64]) -> Result<f64> {
        check_dimension(self.dimension, x.len())?;
        let member = self
            .members
            .get(k)
            .ok_or_else(|| Error::InvalidInput(format!("no candidate {k}")))?;
        Ok(member.predict_from_row(&self.row(x)))
    }
}
