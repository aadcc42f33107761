//! Polynomial hyperparameter sequences indexed by sample count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack absorbed before rounding `B * i^zeta` up, so exact integers
/// (e.g. `8^(1/3)`) are not bumped by a trailing ulp.
const CEIL_SLACK: f64 = 1e-9;

/// What the shrinkage weight of a basis function is a power of.
///
/// The two agree for univariate bases. For tensor bases `Product` uses the
/// product of the multi-index, which is far smaller than the catalog position
/// once many functions share a product, so higher terms get larger steps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShrinkageIndex {
    /// `k^(-2 omega)` for the k-th catalog function.
    #[default]
    Position,
    /// `(l[1] * ... * l[p])^(-2 omega)` for multi-index `l`.
    Product,
}

/// Step size `A * i^-zeta` and basis count `ceil(B * i^zeta)` for sieve-SGD,
/// with shrinkage exponent `omega` on the k-th coordinate (`k^(-2 omega)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSieve {
    a: f64,
    b: f64,
    zeta: f64,
    omega: f64,
    /// Assumed smoothness when built from [`ScheduleSieve::rate_optimal`].
    s: Option<f64>,
    #[serde(default)]
    index: ShrinkageIndex,
}

impl ScheduleSieve {
    /// Rate-optimal schedule for smoothness `s`: `zeta = 1 / (2s + 1)`.
    pub fn rate_optimal(a: f64, b: f64, s: f64, omega: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "smoothness s must be > 0, got {s}"
            )));
        }
        let mut schedule = Self::with_exponent(a, b, 1.0 / (2.0 * s + 1.0), omega)?;
        schedule.s = Some(s);
        Ok(schedule)
    }

    /// Schedule with an explicit exponent; `zeta = 0` gives constant sequences.
    pub fn with_exponent(a: f64, b: f64, zeta: f64, omega: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "step constant A must be > 0, got {a}"
            )));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "basis constant B must be > 0, got {b}"
            )));
        }
        if !(0.0..1.0).contains(&zeta) {
            return Err(Error::InvalidConfig(format!(
                "exponent must lie in [0, 1), got {zeta}"
            )));
        }
        if !(omega > 0.5 && omega.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "omega must be > 1/2, got {omega}"
            )));
        }
        Ok(Self {
            a,
            b,
            zeta,
            omega,
            s: None,
            index: ShrinkageIndex::Position,
        })
    }

    /// Re-checks the constructor invariants, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        Self::with_exponent(self.a, self.b, self.zeta, self.omega)?;
        if let Some(s) = self.s {
            let expected = Self::rate_optimal(self.a, self.b, s, self.omega)?;
            if expected.zeta != self.zeta {
                return Err(Error::InvalidConfig(format!(
                    "exponent {} does not match smoothness {s}",
                    self.zeta
                )));
            }
        }
        Ok(())
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn smoothness(&self) -> Option<f64> {
        self.s
    }

    pub fn with_shrinkage_index(mut self, index: ShrinkageIndex) -> Self {
        self.index = index;
        self
    }

    pub fn shrinkage_index(&self) -> ShrinkageIndex {
        self.index
    }

    /// `gamma_i` for the step that consumes sample `i >= 1`.
    pub fn step_size(&self, i: u64) -> f64 {
        self.a * (i.max(1) as f64).powf(-self.zeta)
    }

    /// `J_i = max(1, ceil(B * i^zeta))`.
    pub fn basis_count(&self, i: u64) -> usize {
        let raw = self.b * (i.max(1) as f64).powf(self.zeta);
        ((raw - CEIL_SLACK).ceil() as usize).max(1)
    }

    /// `k^(-2 omega)` for the `k`-th (1-based) basis function.
    pub fn shrinkage(&self, k: usize) -> f64 {
        (k as f64).powf(-2.0 * self.omega)
    }

    /// Shrinkage weight of the `k`-th catalog function, whose multi-index has
    /// entry product `product`.
    pub fn shrinkage_for(&self, k: usize, product: u64) -> f64 {
        match self.index {
            ShrinkageIndex::Position => self.shrinkage(k),
            ShrinkageIndex::Product => (product as f64).powf(-2.0 * self.omega),
        }
    }
}

/// Step-size sequence `A * i^-zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSchedule {
    a: f64,
    zeta: f64,
}

impl StepSchedule {
    pub fn new(a: f64, zeta: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "step constant A must be > 0, got {a}"
            )));
        }
        if !(0.0..1.0).contains(&zeta) {
            return Err(Error::InvalidConfig(format!(
                "exponent must lie in [0, 1), got {zeta}"
            )));
        }
        Ok(Self { a, zeta })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn step_size(&self, i: u64) -> f64 {
        self.a * (i.max(1) as f64).powf(-self.zeta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn integer_powers_are_not_bumped() {
        let s = ScheduleSieve::rate_optimal(1.0, 1.0, 1.0, 0.51).unwrap();
        assert_eq!(s.basis_count(8), 2);
        assert_eq!(s.basis_count(27), 3);
        assert_eq!(s.basis_count(28), 4);
        assert_eq!(s.basis_count(1), 1);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ScheduleSieve::rate_optimal(0.0, 1.0, 1.0, 0.51).is_err());
        assert!(ScheduleSieve::rate_optimal(1.0, -1.0, 1.0, 0.51).is_err());
        assert!(ScheduleSieve::rate_optimal(1.0, 1.0, 0.0, 0.51).is_err());
        assert!(ScheduleSieve::rate_optimal(1.0, 1.0, 1.0, 0.5).is_err());
        assert!(StepSchedule::new(1.0, 1.0).is_err());
    }

    #[test]
    fn shrinkage_indices() {
        let pos = ScheduleSieve::rate_optimal(1.0, 1.0, 1.0, 0.5 + 0.25).unwrap();
        let prod = pos.with_shrinkage_index(ShrinkageIndex::Product);
        // 7th catalog function with multi-index product 4
        assert_eq!(pos.shrinkage_for(7, 4), 7f64.powf(-1.5));
        assert_eq!(prod.shrinkage_for(7, 4), 0.125);
        // univariate: product equals position
        assert_eq!(pos.shrinkage_for(5, 5), prod.shrinkage_for(5, 5));
    }

    proptest! {
        #[test]
        fn monotone(a in 0.01f64..10.0, b in 0.1f64..10.0, s in 0.2f64..6.0, i in 1u64..100_000) {
            let sch = ScheduleSieve::rate_optimal(a, b, s, 0.51).unwrap();
            prop_assert!(sch.basis_count(i + 1) >= sch.basis_count(i));
            prop_assert!(sch.step_size(i + 1) <= sch.step_size(i));
            let step = StepSchedule::new(a, 1.0 / (2.0 * s + 1.0)).unwrap();
            prop_assert!(step.step_size(i + 1) <= step.step_size(i));
        }
    }
}
