use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::LossKind;

/// Weighted rolling-validation score `sum_{l>=1} l^xi * loss(f_l(X_{l+1}), Y_{l+1})`.
///
/// `steps` counts accumulated terms; the next call must carry `l = steps + 1`.
/// The sum is kept with Neumaier compensation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RvTracker {
    xi: f64,
    acc: f64,
    compensation: f64,
    steps: u64,
}

impl RvTracker {
    pub fn new(xi: f64) -> Result<Self> {
        if !(xi >= 0.0 && xi.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "weight exponent must be >= 0, got {xi}"
            )));
        }
        Ok(Self {
            xi,
            acc: 0.0,
            compensation: 0.0,
            steps: 0,
        })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Current statistic.
    pub fn value(&self) -> f64 {
        self.acc + self.compensation
    }

    /// Weight `l^xi` applied to the term of the estimator trained on `l` samples.
    pub fn weight(&self, l: u64) -> f64 {
        if self.xi == 0.0 {
            1.0
        } else {
            (l as f64).powf(self.xi)
        }
    }

    /// Scores the prediction of the estimator trained on `l` samples
    /// against sample `l + 1`.
    pub fn rv_update(&mut self, l: u64, prediction: f64, y: f64, loss: &LossKind) -> Result<()> {
        if l == 0 || l != self.steps + 1 {
            return Err(Error::Sequencing {
                expected: self.steps + 1,
                found: l,
            });
        }
        let term = self.weight(l) * loss.eval(prediction, y)?;
        self.add(term);
        self.steps = l;
        Ok(())
    }

    fn add(&mut self, term: f64) {
        let t = self.acc + term;
        if self.acc.abs() >= term.abs() {
            self.compensation += (self.acc - t) + term;
        } else {
            self.compensation += (term - t) + self.acc;
        }
        self.acc = t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(xi: f64, ys: &[f64]) -> f64 {
        let mut t = RvTracker::new(xi).unwrap();
        // zero estimator; sample 1 is skipped
        for (l, &y) in ys.iter().enumerate().skip(1) {
            t.rv_update(l as u64, 0.0, y, &LossKind::Squared).unwrap();
        }
        t.value()
    }

    #[test]
    fn direct_formula_examples() {
        assert_eq!(run(0.0, &[1.0, 2.0, 3.0]), 13.0);
        assert_eq!(run(1.0, &[1.0, 2.0, 3.0]), 22.0);
        assert_eq!(run(2.0, &[0.0, 0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn sequencing_is_enforced() {
        let mut t = RvTracker::new(1.0).unwrap();
        assert!(matches!(
            t.rv_update(0, 0.0, 1.0, &LossKind::Squared),
            Err(Error::Sequencing {
                expected: 1,
                found: 0
            })
        ));
        t.rv_update(1, 0.0, 1.0, &LossKind::Squared).unwrap();
        assert!(matches!(
            t.rv_update(3, 0.0, 1.0, &LossKind::Squared),
            Err(Error::Sequencing {
                expected: 2,
                found: 3
            })
        ));
    }

    #[test]
    fn negative_xi_rejected() {
        assert!(RvTracker::new(-1.0).is_err());
        assert!(RvTracker::new(f64::NAN).is_err());
    }

    #[test]
    fn pinball_terms() {
        let mut t = RvTracker::new(1.0).unwrap();
        let loss = LossKind::pinball(0.9).unwrap();
        t.rv_update(1, 0.0, 1.0, &loss).unwrap();
        t.rv_update(2, 1.0, 0.0, &loss).unwrap();
        assert!((t.value() - (0.9 + 2.0 * 0.1)).abs() < 1e-12);
    }
}
