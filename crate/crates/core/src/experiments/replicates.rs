//! Replicated online-selection experiments.
//!
//! Each replicate owns an independently seeded data stream and a fresh set of
//! candidates, tracks RV under every requested weight exponent, and records
//! ranks, the current selection and (optionally) the oracle error at each
//! checkpoint. Aggregation always folds replicates in index order, so the
//! result does not depend on how many worker threads ran them.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::candidates::CandidateSpecTable;
use super::generators::{derive_seed, GeneratorKind, STREAM_DATA, STREAM_TEST};
use super::oracle::OracleTestSet;
use crate::error::{Error, Result};
use crate::loss::LossKind;
use crate::selection::{
    argmin, tied_ranks, CandidatePool, CheckpointRule, IndependentPool, SelectionHarness,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub generator: GeneratorKind,
    pub candidates: CandidateSpecTable,
    #[serde(default)]
    pub loss: LossKind,
    pub xis: Vec<f64>,
    pub n_max: u64,
    pub replicates: usize,
    #[serde(default)]
    pub checkpoints: CheckpointRule,
    pub seed: u64,
    /// Test-set size for oracle errors; `None` skips them.
    #[serde(default)]
    pub oracle_n_test: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        self.loss.validate()?;
        if self.xis.is_empty() || self.xis.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
            return Err(Error::InvalidConfig(
                "weight exponents must be a non-empty list of values >= 0".into(),
            ));
        }
        if self.n_max < 2 {
            return Err(Error::InvalidConfig("n_max must be at least 2".into()));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig(
                "replicate count must be positive".into(),
            ));
        }
        if self.oracle_n_test == Some(0) {
            return Err(Error::InvalidConfig(
                "oracle test size must be positive".into(),
            ));
        }
        CandidateSpecTable::new(self.candidates.rows().to_vec())?;
        Ok(())
    }
}

/// Everything one replicate records.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateResult {
    pub checkpoints: Vec<u64>,
    /// `rv[x][c][k]`: exponent `x`, checkpoint `c`, candidate `k`.
    pub rv: Vec<Vec<Vec<f64>>>,
    /// `selected[x][c]`: index of the argmin candidate.
    pub selected: Vec<Vec<usize>>,
    /// `oracle_mse[c][k]`.
    pub oracle_mse: Option<Vec<Vec<f64>>>,
}

pub fn run_single_replicate(
    config: &ExperimentConfig,
    replicate: usize,
) -> Result<ReplicateResult> {
    let wrap = |e: Error| Error::Replicate {
        replicate,
        source: Box::new(e),
    };
    let p = config.generator.dimension();
    let estimators = config.candidates.build(p, config.loss).map_err(wrap)?;
    let pool = IndependentPool::new(estimators).map_err(wrap)?;
    let mut harness = SelectionHarness::with_exponents(
        pool,
        config.candidates.labels(),
        config.loss,
        &config.xis,
    )
    .map_err(wrap)?;
    let test = config
        .oracle_n_test
        .map(|n| {
            OracleTestSet::draw(
                &config.generator,
                n,
                derive_seed(config.seed, STREAM_TEST, replicate as u64),
            )
        })
        .transpose()
        .map_err(wrap)?;
    let mut rng =
        ChaCha8Rng::seed_from_u64(derive_seed(config.seed, STREAM_DATA, replicate as u64));

    let checkpoints = config.checkpoints.points(config.n_max);
    let nx = config.xis.len();
    let mut rv = vec![Vec::with_capacity(checkpoints.len()); nx];
    let mut selected = vec![Vec::with_capacity(checkpoints.len()); nx];
    let mut oracle = test.as_ref().map(|_| Vec::with_capacity(checkpoints.len()));

    let mut next = checkpoints.iter().peekable();
    for n in 1..=config.n_max {
        let sample = config.generator.draw(&mut rng);
        harness.step(&sample).map_err(wrap)?;
        if next.peek() == Some(&&n) {
            next.next();
            for x in 0..nx {
                let values = harness.rv_values(x);
                selected[x].push(argmin(&values));
                rv[x].push(values);
            }
            if let (Some(test), Some(rows)) = (&test, oracle.as_mut()) {
                let pool = harness.pool();
                let row = (0..pool.len())
                    .map(|k| test.mse_with(|x| pool.predict(k, x)))
                    .collect::<Result<Vec<_>>>()
                    .map_err(wrap)?;
                rows.push(row);
            }
        }
    }
    Ok(ReplicateResult {
        checkpoints,
        rv,
        selected,
        oracle_mse: oracle,
    })
}

/// Replicate means per exponent, checkpoint and candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateTrace {
    pub labels: Vec<String>,
    pub xis: Vec<f64>,
    pub checkpoints: Vec<u64>,
    pub replicates: usize,
    /// `mean_rank[x][c][k]`, ranks with ties sharing the lowest rank.
    pub mean_rank: Vec<Vec<Vec<f64>>>,
    /// `selection_freq[x][c][k]`, fraction of replicates selecting `k`.
    pub selection_freq: Vec<Vec<Vec<f64>>>,
    /// `oracle_mse[c][k]`, mean oracle error.
    pub oracle_mse: Option<Vec<Vec<f64>>>,
    /// `oracle_mean_rank[c][k]`, mean rank of the oracle error.
    pub oracle_mean_rank: Option<Vec<Vec<f64>>>,
}

impl AggregateTrace {
    /// Folds replicate results given in replicate-index order.
    pub fn from_results(
        labels: Vec<String>,
        xis: Vec<f64>,
        results: &[ReplicateResult],
    ) -> Result<Self> {
        let first = results.first().ok_or(Error::EmptyData)?;
        let nk = labels.len();
        let nc = first.checkpoints.len();
        let nx = xis.len();
        let mut mean_rank = vec![vec![vec![0.0; nk]; nc]; nx];
        let mut freq = vec![vec![vec![0.0; nk]; nc]; nx];
        let with_oracle = first.oracle_mse.is_some();
        let mut oracle = vec![vec![0.0; nk]; nc];
        let mut oracle_rank = vec![vec![0.0; nk]; nc];
        for r in results {
            for x in 0..nx {
                for c in 0..nc {
                    for (k, rank) in tied_ranks(&r.rv[x][c]).into_iter().enumerate() {
                        mean_rank[x][c][k] += rank as f64;
                    }
                    freq[x][c][r.selected[x][c]] += 1.0;
                }
            }
            if let Some(o) = &r.oracle_mse {
                for c in 0..nc {
                    for (k, rank) in tied_ranks(&o[c]).into_iter().enumerate() {
                        oracle[c][k] += o[c][k];
                        oracle_rank[c][k] += rank as f64;
                    }
                }
            }
        }
        let count = results.len() as f64;
        let scale = |m: &mut Vec<Vec<f64>>| m.iter_mut().flatten().for_each(|v| *v /= count);
        mean_rank.iter_mut().for_each(scale);
        freq.iter_mut().for_each(scale);
        let (oracle_mse, oracle_mean_rank) = if with_oracle {
            scale(&mut oracle);
            scale(&mut oracle_rank);
            (Some(oracle), Some(oracle_rank))
        } else {
            (None, None)
        };
        Ok(Self {
            labels,
            xis,
            checkpoints: first.checkpoints.clone(),
            replicates: results.len(),
            mean_rank,
            selection_freq: freq,
            oracle_mse,
            oracle_mean_rank,
        })
    }

    pub fn xi_index(&self, xi: f64) -> Option<usize> {
        self.xis.iter().position(|&x| x == xi)
    }

    pub fn checkpoint_index(&self, n: u64) -> Option<usize> {
        self.checkpoints.iter().position(|&c| c == n)
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// CSV with columns `xi,checkpoint_n,candidate_label,mean_rank,selection_freq[,oracle_mse]`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::InvalidInput(format!("write failed: {e}"));
        if self.oracle_mse.is_some() {
            writeln!(
                out,
                "xi,checkpoint_n,candidate_label,mean_rank,selection_freq,oracle_mse"
            )
            .map_err(io)?;
        } else {
            writeln!(
                out,
                "xi,checkpoint_n,candidate_label,mean_rank,selection_freq"
            )
            .map_err(io)?;
        }
        for (x, xi) in self.xis.iter().enumerate() {
            for (c, n) in self.checkpoints.iter().enumerate() {
                for (k, label) in self.labels.iter().enumerate() {
                    write!(
                        out,
                        "{xi},{n},{label},{},{}",
                        self.mean_rank[x][c][k], self.selection_freq[x][c][k]
                    )
                    .map_err(io)?;
                    if let Some(o) = &self.oracle_mse {
                        write!(out, ",{}", o[c][k]).map_err(io)?;
                    }
                    writeln!(out).map_err(io)?;
                }
            }
        }
        Ok(())
    }
}

/// Runs every replicate on `jobs` worker threads and aggregates.
pub fn run_replicates(config: &ExperimentConfig, jobs: usize) -> Result<AggregateTrace> {
    run_replicates_with(config, jobs, |_| Ok::<(), Error>(()))
}

/// Like [`run_replicates`], calling `flush` with the aggregate of every
/// completed prefix of replicates as batches finish. A flush error aborts
/// the run and is returned as is.
pub fn run_replicates_with<F, E>(
    config: &ExperimentConfig,
    jobs: usize,
    mut flush: F,
) -> std::result::Result<AggregateTrace, E>
where
    F: FnMut(&AggregateTrace) -> std::result::Result<(), E>,
    E: From<Error>,
{
    config.validate()?;
    let threads = jobs.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let batch = (threads * 4).max(8);
    let mut results: Vec<ReplicateResult> = Vec::with_capacity(config.replicates);
    let mut start = 0;
    while start < config.replicates {
        let end = (start + batch).min(config.replicates);
        let chunk: Vec<Result<ReplicateResult>> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|r| run_single_replicate(config, r))
                .collect()
        });
        for r in chunk {
            results.push(r?);
        }
        let partial =
            AggregateTrace::from_results(config.candidates.labels(), config.xis.clone(), &results)?;
        flush(&partial)?;
        start = end;
    }
    Ok(AggregateTrace::from_results(
        config.candidates.labels(),
        config.xis.clone(),
        &results,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::candidates::CandidateSpec;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            generator: GeneratorKind::Example1,
            candidates: CandidateSpecTable::example1(),
            loss: LossKind::Squared,
            xis: vec![0.0, 1.0],
            n_max: 300,
            replicates: 6,
            checkpoints: CheckpointRule::default(),
            seed: 17,
            oracle_n_test: Some(200),
        }
    }

    #[test]
    fn identical_candidates_share_rank_one() {
        let mut config = small_config();
        config.candidates = CandidateSpecTable::new(vec![
            CandidateSpec::sieve("a", 2.0, 0.1, 1.0, 0.51),
            CandidateSpec::sieve("b", 2.0, 0.1, 1.0, 0.51),
        ])
        .unwrap();
        let agg = run_replicates(&config, 1).unwrap();
        for row in agg.mean_rank.iter().flatten() {
            assert_eq!(row, &vec![1.0, 1.0]);
        }
    }

    #[test]
    fn deterministic_and_independent_of_jobs() {
        let config = small_config();
        let a = run_replicates(&config, 1).unwrap();
        let b = run_replicates(&config, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn order_of_execution_does_not_matter() {
        let config = small_config();
        let forward: Vec<_> = (0..config.replicates)
            .map(|r| run_single_replicate(&config, r).unwrap())
            .collect();
        let mut backward: Vec<_> = (0..config.replicates)
            .rev()
            .map(|r| (r, run_single_replicate(&config, r).unwrap()))
            .collect();
        backward.sort_by_key(|(r, _)| *r);
        let backward: Vec<_> = backward.into_iter().map(|(_, res)| res).collect();
        let labels = config.candidates.labels();
        assert_eq!(
            AggregateTrace::from_results(labels.clone(), config.xis.clone(), &forward).unwrap(),
            AggregateTrace::from_results(labels, config.xis.clone(), &backward).unwrap()
        );
    }

    #[test]
    fn frequencies_sum_to_one() {
        let agg = run_replicates(&small_config(), 1).unwrap();
        for row in agg.selection_freq.iter().flatten() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!(agg.oracle_mse.is_some());
    }

    #[test]
    fn partial_flushes_cover_prefixes() {
        let mut config = small_config();
        config.replicates = 20;
        config.n_max = 50;
        let mut seen = Vec::new();
        run_replicates_with(&config, 1, |p| {
            seen.push(p.replicates);
            Ok::<(), Error>(())
        })
        .unwrap();
        assert_eq!(seen, vec![8, 16, 20]);
    }

    #[test]
    fn failures_carry_replicate_and_candidate() {
        let mut config = small_config();
        config.candidates =
            CandidateSpecTable::new(vec![CandidateSpec::sieve("wild", 1.0, 500.0, 8.0, 0.51)])
                .unwrap();
        let err = run_replicates(&config, 1).unwrap_err();
        match err {
            Error::Replicate {
                replicate: 0,
                source,
            } => match *source {
                Error::Candidate {
                    ref label,
                    ref source,
                } => {
                    assert_eq!(label, "wild");
                    assert!(matches!(**source, Error::NumericOverflow { .. }));
                }
                ref other => panic!("unexpected {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_schema() {
        let mut config = small_config();
        config.oracle_n_test = None;
        config.replicates = 2;
        let agg = run_replicates(&config, 1).unwrap();
        let mut buf = Vec::new();
        agg.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "xi,checkpoint_n,candidate_label,mean_rank,selection_freq"
        );
        assert_eq!(lines.count(), 2 * agg.checkpoints.len() * 4);
    }
}
