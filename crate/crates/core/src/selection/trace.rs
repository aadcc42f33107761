use std::io::Write;

use serde::{Deserialize, Serialize};

use super::harness::SelectionHarness;
use super::pool::CandidatePool;
use crate::error::{Error, Result};

/// Ranks with ties sharing the lowest rank: `[4, 4, 9] -> [1, 1, 3]`.
pub fn tied_ranks(values: &[f64]) -> Vec<usize> {
    values
        .iter()
        .map(|v| 1 + values.iter().filter(|w| *w < v).count())
        .collect()
}

/// Sample counts at which RV values are recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckpointRule {
    /// `round(10^(k / per_decade))` for `k = 0, 1, ...`, deduplicated, from `n = 2`.
    Geometric {
        per_decade: u32,
    },
    Every(u64),
    Explicit(Vec<u64>),
}

impl Default for CheckpointRule {
    fn default() -> Self {
        CheckpointRule::Geometric { per_decade: 10 }
    }
}

impl CheckpointRule {
    /// Checkpoints up to and including `n_max`.
    pub fn points(&self, n_max: u64) -> Vec<u64> {
        let mut out: Vec<u64> = match self {
            CheckpointRule::Geometric { per_decade } => {
                let per = f64::from((*per_decade).max(1));
                let mut v = Vec::new();
                let mut k = 0u32;
                loop {
                    let n = 10f64.powf(f64::from(k) / per).round() as u64;
                    if n > n_max {
                        break;
                    }
                    if n >= 2 {
                        v.push(n);
                    }
                    k += 1;
                }
                v
            }
            CheckpointRule::Every(step) => {
                let step = (*step).max(1);
                (1..=n_max / step).map(|m| m * step).collect()
            }
            CheckpointRule::Explicit(list) => list
                .iter()
                .copied()
                .filter(|&n| n >= 1 && n <= n_max)
                .collect(),
        };
        if n_max >= 1 {
            out.push(n_max);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Whether `n` is a checkpoint of an unbounded stream (the final sample
    /// count is not included unless the rule lists it).
    pub fn contains(&self, n: u64) -> bool {
        match self {
            CheckpointRule::Geometric { per_decade } => {
                if n < 2 {
                    return false;
                }
                let per = f64::from((*per_decade).max(1));
                let centre = ((n as f64).log10() * per).round() as i64;
                (centre - 2..=centre + 2)
                    .filter(|&k| k >= 0)
                    .any(|k| 10f64.powf(k as f64 / per).round() as u64 == n)
            }
            CheckpointRule::Every(step) => n >= 1 && n.is_multiple_of((*step).max(1)),
            CheckpointRule::Explicit(list) => list.contains(&n),
        }
    }
}

/// RV values and ranks recorded at a sequence of sample counts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub labels: Vec<String>,
    pub checkpoints: Vec<u64>,
    /// `rv_values[c][k]`: checkpoint `c`, candidate `k`.
    pub rv_values: Vec<Vec<f64>>,
    pub ranks: Vec<Vec<usize>>,
}

impl SelectionTrace {
    pub fn new(labels: Vec<String>) -> Self {
        Self {
            labels,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.checkpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checkpoints.is_empty()
    }

    /// Appends the harness state for exponent `xis[xi_index]`.
    pub fn record_checkpoint<P: CandidatePool>(
        &mut self,
        harness: &SelectionHarness<P>,
        xi_index: usize,
    ) {
        if self.labels.is_empty() {
            self.labels = harness.labels().to_vec();
        }
        let rv = harness.rv_values(xi_index);
        self.ranks.push(tied_ranks(&rv));
        self.rv_values.push(rv);
        self.checkpoints.push(harness.samples_seen());
    }

    /// CSV with columns `checkpoint_n,candidate_label,rv,rank`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::InvalidInput(format!("write failed: {e}"));
        writeln!(out, "checkpoint_n,candidate_label,rv,rank").map_err(io)?;
        for (c, &n) in self.checkpoints.iter().enumerate() {
            for (k, label) in self.labels.iter().enumerate() {
                writeln!(
                    out,
                    "{n},{label},{},{}",
                    self.rv_values[c][k], self.ranks[c][k]
                )
                .map_err(io)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contains_agrees_with_points() {
        for rule in [
            CheckpointRule::default(),
            CheckpointRule::Geometric { per_decade: 3 },
            CheckpointRule::Every(7),
            CheckpointRule::Explicit(vec![5, 50, 60]),
        ] {
            let mut pts = rule.points(20_000);
            pts.pop();
            for n in 1..20_000 {
                assert_eq!(rule.contains(n), pts.contains(&n), "{rule:?} n={n}");
            }
        }
    }
    use crate::estimators::ConstantPredictor;
    use crate::loss::LossKind;
    use crate::sample::Sample;
    use crate::selection::IndependentPool;
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        assert_eq!(tied_ranks(&[5.0, 3.0, 7.0]), vec![2, 1, 3]);
        assert_eq!(tied_ranks(&[4.0, 4.0, 9.0]), vec![1, 1, 3]);
    }

    #[test]
    fn geometric_points() {
        let pts = CheckpointRule::default().points(1000);
        assert_eq!(pts[..6], [2, 3, 4, 5, 6, 8]);
        assert!(pts.contains(&100));
        assert!(pts.contains(&501));
        assert_eq!(*pts.last().unwrap(), 1000);
        assert_eq!(
            CheckpointRule::Every(300).points(1000),
            vec![300, 600, 900, 1000]
        );
    }

    #[test]
    fn record_and_csv() {
        let pool = IndependentPool::new(vec![
            ConstantPredictor::new(1, 0.0),
            ConstantPredictor::new(1, 1.0),
        ])
        .unwrap();
        let labels = vec!["a".to_string(), "b".to_string()];
        let mut h = SelectionHarness::new(pool, labels, LossKind::Squared, 0.0).unwrap();
        let mut trace = SelectionTrace::default();
        for y in [1.0, 1.0, 2.0] {
            h.step(&Sample::new(vec![0.0], y)).unwrap();
        }
        trace.record_checkpoint(&h, 0);
        assert_eq!(trace.len(), 1);
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "checkpoint_n,candidate_label,rv,rank\n3,a,5,2\n3,b,1,1\n"
        );
    }

    proptest! {
        #[test]
        fn ranks_are_tied_permutations(values in proptest::collection::vec(0u8..6, 1..12)) {
            let v: Vec<f64> = values.iter().map(|&x| f64::from(x)).collect();
            let r = tied_ranks(&v);
            // the minimum always gets rank 1 and each rank equals 1 + #strictly smaller
            prop_assert!(r.contains(&1));
            let mut sorted = r.clone();
            sorted.sort_unstable();
            for (pos, &rank) in sorted.iter().enumerate() {
                prop_assert!(rank <= pos + 1);
                if pos == 0 || sorted[pos - 1] != rank {
                    prop_assert_eq!(rank, pos + 1);
                }
            }
        }
    }
}
