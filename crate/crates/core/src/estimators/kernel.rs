use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{dot, guard, running_mean, OnlineEstimator, Predictor, StepSchedule};
use crate::error::{check_dimension, Error, Result};
use crate::loss::LossKind;
use crate::sample::Sample;

/// Positive-definite kernel on `R^p`.
pub trait Kernel: Send + Sync {
    fn eval(&self, a: &[f64], b: &[f64]) -> f64;
}

/// `exp(-|a - b|^2 / (2 bandwidth^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianKernel {
    bandwidth: f64,
}

impl GaussianKernel {
    pub fn new(bandwidth: f64) -> Result<Self> {
        if bandwidth > 0.0 && bandwidth.is_finite() {
            Ok(Self { bandwidth })
        } else {
            Err(Error::InvalidConfig(format!(
                "bandwidth must be > 0, got {bandwidth}"
            )))
        }
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
}

impl Kernel for GaussianKernel {
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let d2: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
        (-d2 / (2.0 * self.bandwidth * self.bandwidth)).exp()
    }
}

/// Wraps a kernel and counts its evaluations.
#[derive(Debug, Clone)]
pub struct CountingKernel<K> {
    inner: K,
    count: Arc<AtomicU64>,
}

impl<K: Kernel> CountingKernel<K> {
    pub fn new(inner: K) -> Self {
        Self {
            inner,
            count: Arc::new(AtomicU64::new(0)),
        }
    }

    /// Evaluations so far, across all clones of this kernel.
    pub fn count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

impl<K: Kernel> Kernel for CountingKernel<K> {
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.eval(a, b)
    }
}

/// Per-candidate coefficients of a kernel expansion over a support list
/// owned elsewhere.
///
/// `traj[m]` and `avg[m]` multiply `K(X_m, .)` in the trajectory and the
/// averaged function respectively.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelCoefficients {
    schedule: StepSchedule,
    loss: LossKind,
    traj: Vec<f64>,
    avg: Vec<f64>,
    i: u64,
}

impl KernelCoefficients {
    pub fn new(schedule: StepSchedule, loss: LossKind) -> Result<Self> {
        loss.validate()?;
        Ok(Self {
            schedule,
            loss,
            traj: Vec::new(),
            avg: Vec::new(),
            i: 0,
        })
    }

    pub fn schedule(&self) -> &StepSchedule {
        &self.schedule
    }

    pub fn trajectory(&self) -> &[f64] {
        &self.traj
    }

    pub fn averaged(&self) -> &[f64] {
        &self.avg
    }

    pub fn samples_seen(&self) -> u64 {
        self.i
    }

    /// Averaged prediction from a precomputed row `K(X_m, x)`.
    pub fn predict_from_row(&self, row: &[f64]) -> f64 {
        dot(&self.avg, row)
    }

    /// Consumes sample `i + 1` given its kernel row against the current
    /// support, and returns the pre-update averaged prediction. The caller
    /// appends the sample's covariate to the support afterwards.
    pub fn step(&mut self, row: &[f64], y: f64) -> Result<f64> {
        if row.len() != self.traj.len() {
            return Err(Error::InvalidConfig(format!(
                "kernel row has {} entries, support has {}",
                row.len(),
                self.traj.len()
            )));
        }
        let i = self.i + 1;
        let prediction = dot(&self.avg, row);
        let fitted = dot(&self.traj, row);
        let factor = self.loss.descent_factor(fitted, y)?;
        let coef = self.schedule.step_size(i) * factor;
        if !coef.is_finite() {
            return Err(Error::NumericOverflow { step: i });
        }
        guard(&[coef], i)?;
        self.traj.push(coef);
        self.avg.push(0.0);
        running_mean(&mut self.avg, &self.traj, i);
        self.i = i;
        Ok(prediction)
    }
}

/// Kernel-SGD with Polyak averaging and a fixed kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSgd<K = GaussianKernel> {
    kernel: K,
    dimension: usize,
    support: Vec<Vec<f64>>,
    coef: KernelCoefficients,
}

impl<K: Kernel> KernelSgd<K> {
    pub fn new(
        dimension: usize,
        kernel: K,
        schedule: StepSchedule,
        loss: LossKind,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidConfig("dimension must be positive".into()));
        }
        Ok(Self {
            kernel,
            dimension,
            support: Vec::new(),
            coef: KernelCoefficients::new(schedule, loss)?,
        })
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    pub fn support(&self) -> &[Vec<f64>] {
        &self.support
    }

    pub fn coefficients(&self) -> &KernelCoefficients {
        &self.coef
    }

    /// `K(X_m, x)` for every support point.
    pub fn kernel_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dimension(self.dimension, x.len())?;
        let row: Vec<f64> = self
            .support
            .iter()
            .map(|s| self.kernel.eval(s, x))
            .collect();
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericOverflow {
                step: self.coef.i + 1,
            });
        }
        Ok(row)
    }

    pub fn predict_trajectory(&self, x: &[f64]) -> Result<f64> {
        Ok(dot(&self.coef.traj, &self.kernel_row(x)?))
    }

    /// Applies the update with a row computed elsewhere (see [`shared_kernel_row`]).
    pub fn update_with_row(&mut self, sample: &Sample, row: &[f64]) -> Result<f64> {
        check_dimension(self.dimension, sample.dimension())?;
        let prediction = self.coef.step(row, sample.y)?;
        self.support.push(sample.x.clone());
        Ok(prediction)
    }
}

impl<K: Kernel> Predictor for KernelSgd<K> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(self.coef.predict_from_row(&self.kernel_row(x)?))
    }
}

impl<K: Kernel> OnlineEstimator for KernelSgd<K> {
    fn samples_seen(&self) -> u64 {
        self.coef.i
    }

    fn update(&mut self, sample: &Sample) -> Result<()> {
        self.predict_then_update(sample).map(|_| ())
    }

    fn predict_then_update(&mut self, sample: &Sample) -> Result<f64> {
        let row = self.kernel_row(&sample.x)?;
        self.update_with_row(sample, &row)
    }
}

/// Evaluates `K(X_m, x_new)` once for several estimators that share a support
/// list. All states must hold identical supports.
pub fn shared_kernel_row<K: Kernel>(states: &[&KernelSgd<K>], x_new: &[f64]) -> Result<Vec<f64>> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidConfig("no kernel states given".into()))?;
    if states.iter().any(|s| s.support != first.support) {
        return Err(Error::InvalidConfig(
            "kernel candidates do not share a support".into(),
        ));
    }
    first.kernel_row(x_new)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian() -> GaussianKernel {
        GaussianKernel::new(0.2).unwrap()
    }

    #[test]
    fn hand_recursion() {
        let sched = StepSchedule::new(0.5, 0.0).unwrap();
        let mut est = KernelSgd::new(2, gaussian(), sched, LossKind::Squared).unwrap();
        let x = vec![0.3, 0.6];
        est.update(&Sample::new(x.clone(), 3.0)).unwrap();
        assert_eq!(est.support(), std::slice::from_ref(&x));
        assert_eq!(est.coefficients().trajectory(), &[1.5]);
        assert_eq!(est.coefficients().averaged(), &[1.5]);
        est.update(&Sample::new(x.clone(), 3.0)).unwrap();
        assert_eq!(est.coefficients().trajectory(), &[1.5, 0.75]);
        assert_eq!(est.coefficients().averaged(), &[1.5, 0.375]);
    }

    #[test]
    fn predictions() {
        let sched = StepSchedule::new(1.0, 0.0).unwrap();
        let mut est = KernelSgd::new(1, gaussian(), sched, LossKind::Squared).unwrap();
        assert_eq!(est.predict(&[0.4]).unwrap(), 0.0);
        est.update(&Sample::new(vec![0.4], 2.0)).unwrap();
        assert_eq!(est.predict(&[0.4]).unwrap(), 2.0);
        assert!(est.predict(&[10.0]).unwrap().abs() < 1e-6);
        assert!(est.predict(&[0.4, 0.1]).is_err());
    }

    #[test]
    fn zero_residual_appends_zero() {
        let sched = StepSchedule::new(0.7, 0.25).unwrap();
        let mut est = KernelSgd::new(1, gaussian(), sched, LossKind::Squared).unwrap();
        est.update(&Sample::new(vec![0.1], 1.0)).unwrap();
        est.update(&Sample::new(vec![0.5], -2.0)).unwrap();
        let y = est.predict_trajectory(&[0.3]).unwrap();
        est.update(&Sample::new(vec![0.3], y)).unwrap();
        assert_eq!(*est.coefficients().trajectory().last().unwrap(), 0.0);
    }

    #[test]
    fn shared_row_requires_same_support() {
        let sched = StepSchedule::new(0.5, 0.0).unwrap();
        let mut a = KernelSgd::new(1, gaussian(), sched, LossKind::Squared).unwrap();
        let b = a.clone();
        a.update(&Sample::new(vec![0.2], 1.0)).unwrap();
        assert!(shared_kernel_row(&[&a, &b], &[0.3]).is_err());
        assert_eq!(shared_kernel_row(&[&a, &a], &[0.3]).unwrap().len(), 1);
    }

    #[test]
    fn counting_kernel_counts_rows() {
        let kernel = CountingKernel::new(gaussian());
        let sched = StepSchedule::new(0.5, 0.3).unwrap();
        let mut est = KernelSgd::new(1, kernel.clone(), sched, LossKind::Squared).unwrap();
        for t in 0..10 {
            est.update(&Sample::new(vec![t as f64 / 10.0], 1.0))
                .unwrap();
        }
        assert_eq!(kernel.count(), 45);
    }
}
