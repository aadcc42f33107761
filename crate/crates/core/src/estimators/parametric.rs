use serde::{Deserialize, Serialize};

use super::{dot, guard, running_mean, OnlineEstimator, Predictor};
use crate::error::{check_dimension, Error, Result};
use crate::loss::LossKind;
use crate::sample::Sample;

/// Linear SGD with a constant learning rate and an averaged iterate:
/// `beta_i = beta_{i-1} + gamma * r_i * X_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametricSgd {
    beta: Vec<f64>,
    beta_avg: Vec<f64>,
    gamma: f64,
    i: u64,
    loss: LossKind,
}

impl ParametricSgd {
    pub fn new(dimension: usize, gamma: f64, loss: LossKind) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidConfig("dimension must be positive".into()));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be > 0, got {gamma}"
            )));
        }
        loss.validate()?;
        Ok(Self {
            beta: vec![0.0; dimension],
            beta_avg: vec![0.0; dimension],
            gamma,
            i: 0,
            loss,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn trajectory(&self) -> &[f64] {
        &self.beta
    }

    pub fn averaged(&self) -> &[f64] {
        &self.beta_avg
    }
}

impl Predictor for ParametricSgd {
    fn dimension(&self) -> usize {
        self.beta.len()
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        check_dimension(self.beta.len(), x.len())?;
        Ok(dot(&self.beta_avg, x))
    }
}

impl OnlineEstimator for ParametricSgd {
    fn samples_seen(&self) -> u64 {
        self.i
    }

    fn update(&mut self, sample: &Sample) -> Result<()> {
        check_dimension(self.beta.len(), sample.dimension())?;
        let i = self.i + 1;
        let fitted = dot(&self.beta, &sample.x);
        let factor = self.loss.descent_factor(fitted, sample.y)?;
        let scale = self.gamma * factor;
        if !scale.is_finite() {
            return Err(Error::NumericOverflow { step: i });
        }
        for (b, x) in self.beta.iter_mut().zip(&sample.x) {
            *b += scale * x;
        }
        guard(&self.beta, i)?;
        running_mean(&mut self.beta_avg, &self.beta, i);
        self.i = i;
        Ok(())
    }
}
