//! Candidate hyperparameter tables and the presets of the two simulation studies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    ConstantPredictor, Estimator, GaussianKernel, KernelSgd, ParametricSgd, ScheduleSieve,
    ShrinkageIndex, SieveSgd, StepSchedule,
};
use crate::loss::LossKind;

/// Shrinkage exponent used by both presets.
pub const PRESET_OMEGA: f64 = 0.51;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Sieve,
    Kernel,
    Parametric,
    Constant,
}

/// One row of a candidate table. Only the fields of its family are read:
///
/// | family     | fields                          |
/// |------------|---------------------------------|
/// | sieve      | `s`, `a`, `b`, `omega`, `shrinkage` (default `position`) |
/// | kernel     | `a`, `zeta`, `bandwidth`        |
/// | parametric | `gamma`                         |
/// | constant   | `value` (default 0)             |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSpec {
    pub label: String,
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shrinkage: Option<ShrinkageIndex>,
}

impl CandidateSpec {
    pub fn sieve(label: impl Into<String>, s: f64, a: f64, b: f64, omega: f64) -> Self {
        Self {
            s: Some(s),
            a: Some(a),
            b: Some(b),
            omega: Some(omega),
            ..Self::bare(label, Family::Sieve)
        }
    }

    pub fn kernel(label: impl Into<String>, a: f64, zeta: f64, bandwidth: f64) -> Self {
        Self {
            a: Some(a),
            zeta: Some(zeta),
            bandwidth: Some(bandwidth),
            ..Self::bare(label, Family::Kernel)
        }
    }

    pub fn parametric(label: impl Into<String>, gamma: f64) -> Self {
        Self {
            gamma: Some(gamma),
            ..Self::bare(label, Family::Parametric)
        }
    }

    pub fn constant(label: impl Into<String>, value: f64) -> Self {
        Self {
            value: Some(value),
            ..Self::bare(label, Family::Constant)
        }
    }

    fn bare(label: impl Into<String>, family: Family) -> Self {
        Self {
            label: label.into(),
            family,
            s: None,
            a: None,
            b: None,
            omega: None,
            zeta: None,
            bandwidth: None,
            gamma: None,
            value: None,
            shrinkage: None,
        }
    }

    fn field(&self, value: Option<f64>, name: &str) -> Result<f64> {
        value.ok_or_else(|| {
            Error::InvalidConfig(format!("candidate `{}` is missing `{name}`", self.label))
        })
    }

    pub fn with_shrinkage(mut self, index: ShrinkageIndex) -> Self {
        self.shrinkage = Some(index);
        self
    }

    pub fn sieve_schedule(&self) -> Result<ScheduleSieve> {
        let schedule = ScheduleSieve::rate_optimal(
            self.field(self.a, "a")?,
            self.field(self.b, "b")?,
            self.field(self.s, "s")?,
            self.field(self.omega, "omega")?,
        )?;
        Ok(schedule.with_shrinkage_index(self.shrinkage.unwrap_or_default()))
    }

    pub fn step_schedule(&self) -> Result<StepSchedule> {
        StepSchedule::new(self.field(self.a, "a")?, self.field(self.zeta, "zeta")?)
    }

    pub fn build(&self, dimension: usize, loss: LossKind) -> Result<Estimator> {
        let tag = |e: Error| Error::Candidate {
            label: self.label.clone(),
            source: Box::new(e),
        };
        let built = match self.family {
            Family::Sieve => {
                SieveSgd::new(dimension, self.sieve_schedule()?, loss).map(Estimator::Sieve)
            }
            Family::Kernel => {
                let kernel =
                    GaussianKernel::new(self.field(self.bandwidth, "bandwidth")?).map_err(tag)?;
                KernelSgd::new(dimension, kernel, self.step_schedule()?, loss)
                    .map(Estimator::Kernel)
            }
            Family::Parametric => {
                ParametricSgd::new(dimension, self.field(self.gamma, "gamma")?, loss)
                    .map(Estimator::Parametric)
            }
            Family::Constant => Ok(Estimator::Constant(ConstantPredictor::new(
                dimension,
                self.value.unwrap_or(0.0),
            ))),
        };
        built.map_err(tag)
    }
}

/// Ordered list of candidates with unique labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CandidateSpecTable {
    rows: Vec<CandidateSpec>,
}

impl CandidateSpecTable {
    pub fn new(rows: Vec<CandidateSpec>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidConfig("candidate table is empty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for row in &rows {
            if !seen.insert(row.label.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate candidate label `{}`",
                    row.label
                )));
            }
        }
        Ok(Self { rows })
    }

    /// Four univariate sieve-SGD candidates, `s = 1..4`, with
    /// `gamma_i = 0.1 i^(-1/(2s+1))`, `J_i = ceil(i^(1/(2s+1)))`, `omega = 0.51`.
    pub fn example1() -> Self {
        let rows = (1..=4)
            .map(|s| CandidateSpec::sieve(format!("s{s}"), f64::from(s), 0.1, 1.0, PRESET_OMEGA))
            .collect();
        Self { rows }
    }

    /// The eight multivariate sieve-SGD candidates, labelled `1..8`.
    ///
    /// Tensor functions are shrunk by their multi-index product. Weighting by
    /// catalog position instead starves the later terms of step size, and the
    /// small-step models then never reach the error ordering of the study.
    pub fn example2() -> Self {
        const TABLE: [(f64, f64, f64); 8] = [
            (1.0, 0.1, 2.0),
            (2.0, 0.1, 2.0),
            (1.0, 1.0, 2.0),
            (2.0, 1.0, 2.0),
            (1.0, 0.1, 8.0),
            (2.0, 0.1, 8.0),
            (1.0, 1.0, 8.0),
            (2.0, 1.0, 8.0),
        ];
        let rows = TABLE
            .iter()
            .enumerate()
            .map(|(m, &(s, a, b))| {
                CandidateSpec::sieve((m + 1).to_string(), s, a, b, PRESET_OMEGA)
                    .with_shrinkage(ShrinkageIndex::Product)
            })
            .collect();
        Self { rows }
    }

    pub fn rows(&self) -> &[CandidateSpec] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.rows.iter().map(|r| r.label.clone()).collect()
    }

    pub fn build(&self, dimension: usize, loss: LossKind) -> Result<Vec<Estimator>> {
        self.rows.iter().map(|r| r.build(dimension, loss)).collect()
    }
}
