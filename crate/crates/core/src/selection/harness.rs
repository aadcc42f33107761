use serde::{Deserialize, Serialize};

use super::pool::CandidatePool;
use super::tracker::RvTracker;
use crate::error::{Error, Result};
use crate::loss::LossKind;
use crate::sample::Sample;

/// Online selection loop: every sample is first scored by each candidate's
/// current estimate, then used to update it.
///
/// One row of trackers is kept per weight exponent; all rows see identical
/// predictions. The first sample is never scored because the zero initial
/// estimate carries weight index `l = 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionHarness<P> {
    pool: P,
    labels: Vec<String>,
    loss: LossKind,
    xis: Vec<f64>,
    /// `trackers[x][k]`: exponent `xis[x]`, candidate `k`.
    trackers: Vec<Vec<RvTracker>>,
    i: u64,
}

impl<P: CandidatePool> SelectionHarness<P> {
    pub fn new(pool: P, labels: Vec<String>, loss: LossKind, xi: f64) -> Result<Self> {
        Self::with_exponents(pool, labels, loss, &[xi])
    }

    /// Tracks several weight exponents at once over the same candidates.
    pub fn with_exponents(
        pool: P,
        labels: Vec<String>,
        loss: LossKind,
        xis: &[f64],
    ) -> Result<Self> {
        loss.validate()?;
        if pool.is_empty() {
            return Err(Error::InvalidConfig(
                "harness needs at least one candidate".into(),
            ));
        }
        if labels.len() != pool.len() {
            return Err(Error::InvalidConfig(format!(
                "{} labels for {} candidates",
                labels.len(),
                pool.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::InvalidConfig(format!(
                "duplicate candidate label `{dup}`"
            )));
        }
        if xis.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one weight exponent is required".into(),
            ));
        }
        let trackers = xis
            .iter()
            .map(|&xi| (0..pool.len()).map(|_| RvTracker::new(xi)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Ok(Self {
            pool,
            labels,
            loss,
            xis: xis.to_vec(),
            trackers,
            i: 0,
        })
    }

    pub fn pool(&self) -> &P {
        &self.pool
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn loss(&self) -> LossKind {
        self.loss
    }

    pub fn exponents(&self) -> &[f64] {
        &self.xis
    }

    /// Samples consumed so far.
    pub fn samples_seen(&self) -> u64 {
        self.i
    }

    pub fn trackers(&self, xi_index: usize) -> &[RvTracker] {
        &self.trackers[xi_index]
    }

    /// RV statistics of every candidate for exponent `xis[xi_index]`.
    pub fn rv_values(&self, xi_index: usize) -> Vec<f64> {
        self.trackers[xi_index]
            .iter()
            .map(RvTracker::value)
            .collect()
    }

    /// Processes one sample and returns the pre-update predictions.
    pub fn step(&mut self, sample: &Sample) -> Result<Vec<f64>> {
        let predictions =
            self.pool
                .predict_then_update(sample)
                .map_err(|(k, e)| Error::Candidate {
                    label: self.labels[k].clone(),
                    source: Box::new(e),
                })?;
        if self.i >= 1 {
            for row in &mut self.trackers {
                for (k, tracker) in row.iter_mut().enumerate() {
                    tracker
                        .rv_update(self.i, predictions[k], sample.y, &self.loss)
                        .map_err(|e| Error::Candidate {
                            label: self.labels[k].clone(),
                            source: Box::new(e),
                        })?;
                }
            }
        }
        self.i += 1;
        Ok(predictions)
    }

    /// Index of the candidate with minimal RV for `xis[xi_index]`; ties go to
    /// the lowest index.
    pub fn selected_index(&self, xi_index: usize) -> usize {
        argmin(&self.rv_values(xi_index))
    }

    /// Label of the current selection under the first exponent.
    pub fn current_selection(&self) -> &str {
        &self.labels[self.selected_index(0)]
    }
}

pub(crate) fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = k;
        }
    }
    best
}
