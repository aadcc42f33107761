use serde::{Deserialize, Serialize};

use super::{dot, guard, running_mean, OnlineEstimator, Predictor, ScheduleSieve};
use crate::basis::BasisCatalog;
use crate::error::{check_dimension, Error, Result};
use crate::loss::LossKind;
use crate::sample::Sample;

/// Sieve-SGD in coefficient space.
///
/// Step `i` pads the trajectory with zeros up to `J_i` coefficients and moves
/// it by `gamma_i * r * D_i * phi_i`, where `phi_i` holds the first `J_i`
/// catalog functions at `X_i`, `D_i = diag(k^(-2 omega))` and `r` is the
/// residual (squared loss) or the pinball subgradient sign. With
/// [`ShrinkageIndex::Product`](super::ShrinkageIndex) the weight of a tensor
/// function is the multi-index product raised to `-2 omega` instead.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SieveSgd {
    schedule: ScheduleSieve,
    catalog: BasisCatalog,
    beta_traj: Vec<f64>,
    beta_avg: Vec<f64>,
    i: u64,
    loss: LossKind,
    /// Shrinkage weights, cached up to the current length.
    #[serde(skip)]
    shrink: Vec<f64>,
}

impl PartialEq for SieveSgd {
    fn eq(&self, other: &Self) -> bool {
        self.schedule == other.schedule
            && self.catalog.dimension() == other.catalog.dimension()
            && self.beta_traj == other.beta_traj
            && self.beta_avg == other.beta_avg
            && self.i == other.i
            && self.loss == other.loss
    }
}

impl SieveSgd {
    pub fn new(dimension: usize, schedule: ScheduleSieve, loss: LossKind) -> Result<Self> {
        loss.validate()?;
        schedule.validate()?;
        Ok(Self {
            schedule,
            catalog: BasisCatalog::new(dimension)?,
            beta_traj: Vec::new(),
            beta_avg: Vec::new(),
            i: 0,
            loss,
            shrink: Vec::new(),
        })
    }

    pub fn schedule(&self) -> &ScheduleSieve {
        &self.schedule
    }

    pub fn loss(&self) -> LossKind {
        self.loss
    }

    pub fn catalog(&self) -> &BasisCatalog {
        &self.catalog
    }

    /// Trajectory coefficients `beta_i`.
    pub fn trajectory(&self) -> &[f64] {
        &self.beta_traj
    }

    /// Averaged coefficients used for prediction.
    pub fn averaged(&self) -> &[f64] {
        &self.beta_avg
    }

    /// Trajectory prediction at `x`.
    pub fn predict_trajectory(&self, x: &[f64]) -> Result<f64> {
        self.combine(&self.beta_traj, x)
    }

    fn combine(&self, coef: &[f64], x: &[f64]) -> Result<f64> {
        check_dimension(self.catalog.dimension(), x.len())?;
        if coef.is_empty() {
            return Ok(0.0);
        }
        let phi = self.catalog.materialized_basis_vector(coef.len(), x)?;
        Ok(dot(coef, &phi))
    }

    fn step(&mut self, sample: &Sample, phi: &[f64]) -> Result<()> {
        let i = self.i + 1;
        let j = phi.len();
        let gamma = self.schedule.step_size(i);
        if self.beta_traj.len() < j {
            self.beta_traj.resize(j, 0.0);
            self.beta_avg.resize(j, 0.0);
        }
        while self.shrink.len() < j {
            let k = self.shrink.len() + 1;
            let product = self.catalog.indices()[k - 1].product();
            self.shrink.push(self.schedule.shrinkage_for(k, product));
        }
        let fitted = dot(&self.beta_traj, phi);
        let factor = self.loss.descent_factor(fitted, sample.y)?;
        if !factor.is_finite() {
            return Err(Error::NumericOverflow { step: i });
        }
        let scale = gamma * factor;
        for ((b, w), p) in self.beta_traj.iter_mut().zip(&self.shrink).zip(phi) {
            *b += scale * w * p;
        }
        guard(&self.beta_traj, i)?;
        running_mean(&mut self.beta_avg, &self.beta_traj, i);
        self.i = i;
        Ok(())
    }

    fn next_basis(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        check_dimension(self.catalog.dimension(), x.len())?;
        let j = self
            .schedule
            .basis_count(self.i + 1)
            .max(self.beta_traj.len());
        self.catalog.basis_vector(j, x)
    }
}

impl Predictor for SieveSgd {
    fn dimension(&self) -> usize {
        self.catalog.dimension()
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        self.combine(&self.beta_avg, x)
    }
}

impl OnlineEstimator for SieveSgd {
    fn samples_seen(&self) -> u64 {
        self.i
    }

    fn update(&mut self, sample: &Sample) -> Result<()> {
        let phi = self.next_basis(&sample.x)?;
        self.step(sample, &phi)
    }

    fn predict_then_update(&mut self, sample: &Sample) -> Result<f64> {
        let phi = self.next_basis(&sample.x)?;
        let prediction = dot(&self.beta_avg, &phi[..self.beta_avg.len()]);
        self.step(sample, &phi)?;
        Ok(prediction)
    }
}
