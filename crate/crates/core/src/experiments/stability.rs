//! Perturb-one stability curves.
//!
//! Twin estimators see the same stream except that sample `j` is swapped for
//! an independent copy. The mean squared difference of their predictions over
//! fresh covariates, as a function of the sample size, should decay like a
//! power of `i`; the fitted exponent is compared with the theoretical rates.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generators::{derive_seed, GeneratorKind, STREAM_DATA, STREAM_REPLACEMENT, STREAM_TEST};
use super::oracle::OracleTestSet;
use super::slope::{fit_loglog_slope, SlopeFit};
use crate::basis::BasisCatalog;
use crate::error::{Error, Result};
use crate::estimators::{
    batch_sieve_fit, ConstantPredictor, Estimator, OnlineEstimator, ParametricSgd, Predictor,
    ScheduleSieve, SieveSgd,
};
use crate::loss::LossKind;
use crate::sample::Sample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StabilityFamily {
    Parametric {
        gamma: f64,
    },
    Sieve {
        schedule: ScheduleSieve,
    },
    /// Batch orthogonal-series fit with `J = ceil(n^alpha)`.
    BatchSieve {
        alpha: f64,
    },
    /// Ignores the data; its curve is identically zero.
    Constant,
}

impl StabilityFamily {
    fn validate(&self) -> Result<()> {
        match self {
            StabilityFamily::BatchSieve { alpha } if !(*alpha > 0.0 && *alpha < 1.0) => Err(
                Error::InvalidConfig("batch sieve alpha must lie in (0, 1)".into()),
            ),
            StabilityFamily::Parametric { gamma } if !(*gamma > 0.0 && gamma.is_finite()) => Err(
                Error::InvalidConfig("parametric step size must be > 0".into()),
            ),
            _ => Ok(()),
        }
    }

    fn online(&self, dimension: usize) -> Result<Option<Estimator>> {
        Ok(match self {
            StabilityFamily::Parametric { gamma } => Some(Estimator::Parametric(
                ParametricSgd::new(dimension, *gamma, LossKind::Squared)?,
            )),
            StabilityFamily::Sieve { schedule } => Some(Estimator::Sieve(SieveSgd::new(
                dimension,
                *schedule,
                LossKind::Squared,
            )?)),
            StabilityFamily::Constant => {
                Some(Estimator::Constant(ConstantPredictor::new(dimension, 0.0)))
            }
            StabilityFamily::BatchSieve { .. } => None,
        })
    }
}

/// Which sample of `Z_i` the twin replaces.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JRule {
    /// `j = 1`.
    #[default]
    First,
    /// `j = ceil(i / 2)`.
    Middle,
}

impl JRule {
    pub fn index(self, i: u64) -> u64 {
        match self {
            JRule::First => 1,
            JRule::Middle => i.div_ceil(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    pub family: StabilityFamily,
    pub generator: GeneratorKind,
    pub grid: Vec<u64>,
    #[serde(default)]
    pub j_rule: JRule,
    pub replicates: usize,
    pub n_test: usize,
    pub seed: u64,
    /// Uses the original sample as its own replacement; every difference is then zero.
    #[serde(default)]
    pub coupled_identical: bool,
}

impl StabilityConfig {
    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        self.generator.validate()?;
        if self.grid.is_empty() || self.grid[0] < 2 || self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "grid must be strictly increasing with values >= 2".into(),
            ));
        }
        if self.replicates < 2 {
            return Err(Error::InvalidConfig(
                "stability needs at least 2 replicates".into(),
            ));
        }
        if self.n_test == 0 {
            return Err(Error::InvalidConfig("n_test must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub family: StabilityFamily,
    pub j_rule: JRule,
    pub grid: Vec<u64>,
    /// Replicate mean of the squared twin difference at each grid point.
    pub msd: Vec<f64>,
    pub msd_stderr: Vec<f64>,
    /// Curves of the replicates that completed, in replicate order.
    pub per_replicate: Vec<Vec<f64>>,
    /// Replicates aborted by divergence.
    pub diverged: usize,
    pub fit: SlopeFit,
}

impl StabilityReport {
    /// Fraction of replicates whose curve stays below `msd(i0) (i / i0)^-exponent`,
    /// with `i0` the first grid point.
    pub fn fraction_within_power_bound(&self, exponent: f64) -> f64 {
        if self.per_replicate.is_empty() {
            return 0.0;
        }
        let ok = self
            .per_replicate
            .iter()
            .filter(|curve| within_power_bound(&self.grid, curve, exponent))
            .count();
        ok as f64 / self.per_replicate.len() as f64
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::InvalidInput(format!("write failed: {e}"));
        writeln!(out, "i,msd,msd_stderr").map_err(io)?;
        for ((i, m), s) in self.grid.iter().zip(&self.msd).zip(&self.msd_stderr) {
            writeln!(out, "{i},{m},{s}").map_err(io)?;
        }
        Ok(())
    }

    /// One-row summary; undefined values are written as `NaN`.
    pub fn write_summary_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::InvalidInput(format!("write failed: {e}"));
        let show = |v: Option<f64>| v.map_or_else(|| "NaN".to_string(), |v| v.to_string());
        writeln!(out, "slope,slope_stderr,excluded_points").map_err(io)?;
        writeln!(
            out,
            "{},{},{}",
            show(self.fit.slope),
            show(self.fit.stderr),
            self.fit.excluded
        )
        .map_err(io)
    }
}

/// Whether `curve[g] <= curve[0] (grid[g] / grid[0])^-exponent` at every grid point.
pub fn within_power_bound(grid: &[u64], curve: &[f64], exponent: f64) -> bool {
    let (i0, c0) = (grid[0] as f64, curve[0]);
    grid.iter().zip(curve).all(|(&i, &m)| {
        let bound = c0 * (i as f64 / i0).powf(-exponent);
        m <= bound * (1.0 + 1e-9) + f64::MIN_POSITIVE
    })
}

/// Squared twin differences at each grid point for one replicate.
fn replicate_curve(config: &StabilityConfig, r: usize) -> Result<Vec<f64>> {
    let g = &config.generator;
    let n_max = *config.grid.last().expect("validated grid");
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, STREAM_DATA, r as u64));
    let data: Vec<Sample> = (0..n_max).map(|_| g.draw(&mut rng)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, STREAM_REPLACEMENT, r as u64));
    let fresh = g.draw(&mut rng);
    let test = OracleTestSet::draw(
        g,
        config.n_test,
        derive_seed(config.seed, STREAM_TEST, r as u64),
    )?;

    let replacement = |j: u64| {
        if config.coupled_identical {
            data[(j - 1) as usize].clone()
        } else {
            fresh.clone()
        }
    };
    let sq_diff = |a: &dyn Predictor, b: &dyn Predictor| -> Result<f64> {
        let mut total = 0.0;
        for x in test.covariates() {
            let d = a.predict(x)? - b.predict(x)?;
            total += d * d;
        }
        Ok(total / test.len() as f64)
    };

    let p = g.dimension();
    match (&config.family, config.j_rule) {
        (StabilityFamily::BatchSieve { alpha }, rule) => {
            let catalog = BasisCatalog::new(p)?;
            let mut twin_data = data.clone();
            config
                .grid
                .iter()
                .map(|&i| {
                    let j = rule.index(i);
                    let n = i as usize;
                    let idx = (j - 1) as usize;
                    twin_data[idx] = replacement(j);
                    let count = ((i as f64).powf(*alpha) - 1e-9).ceil().max(1.0) as usize;
                    let a = batch_sieve_fit(&data[..n], count, &catalog)?;
                    let b = batch_sieve_fit(&twin_data[..n], count, &catalog)?;
                    twin_data[idx] = data[idx].clone();
                    sq_diff(&a, &b)
                })
                .collect()
        }
        (family, JRule::First) => {
            // one twin pass; snapshots at every grid point
            let mut a = family.online(p)?.expect("online family");
            let mut b = a.clone();
            let swapped = replacement(1);
            let mut curve = Vec::with_capacity(config.grid.len());
            let mut next = config.grid.iter().peekable();
            for (m, sample) in data.iter().enumerate() {
                a.update(sample)?;
                b.update(if m == 0 { &swapped } else { sample })?;
                if next.peek() == Some(&&(m as u64 + 1)) {
                    next.next();
                    curve.push(sq_diff(&a, &b)?);
                }
            }
            Ok(curve)
        }
        (family, JRule::Middle) => config
            .grid
            .iter()
            .map(|&i| {
                let j = JRule::Middle.index(i);
                let swapped = replacement(j);
                let mut a = family.online(p)?.expect("online family");
                let mut b = a.clone();
                for (m, sample) in data[..i as usize].iter().enumerate() {
                    a.update(sample)?;
                    b.update(if m as u64 + 1 == j { &swapped } else { sample })?;
                }
                sq_diff(&a, &b)
            })
            .collect(),
    }
}

/// Runs every replicate on `jobs` threads and summarizes the curves.
pub fn stability_curve(config: &StabilityConfig, jobs: usize) -> Result<StabilityReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let results: Vec<Result<Vec<f64>>> = pool.install(|| {
        (0..config.replicates)
            .into_par_iter()
            .map(|r| replicate_curve(config, r))
            .collect()
    });

    let mut per_replicate = Vec::with_capacity(results.len());
    let mut diverged = 0;
    let mut first_divergence = None;
    for (r, res) in results.into_iter().enumerate() {
        let wrapped = |e| Error::Replicate {
            replicate: r,
            source: Box::new(e),
        };
        match res {
            Ok(curve) => per_replicate.push(curve),
            Err(e) if e.is_divergence() => {
                diverged += 1;
                first_divergence.get_or_insert_with(|| wrapped(e));
            }
            Err(e) => return Err(wrapped(e)),
        }
    }
    if per_replicate.is_empty() {
        // every replicate diverged; nothing to summarize
        return Err(first_divergence.expect("at least one replicate"));
    }

    let count = per_replicate.len() as f64;
    let (msd, msd_stderr): (Vec<f64>, Vec<f64>) = (0..config.grid.len())
        .map(|g| {
            let mean = per_replicate.iter().map(|c| c[g]).sum::<f64>() / count;
            let var = if count > 1.0 {
                per_replicate
                    .iter()
                    .map(|c| (c[g] - mean).powi(2))
                    .sum::<f64>()
                    / (count - 1.0)
            } else {
                0.0
            };
            (mean, (var / count).sqrt())
        })
        .unzip();
    let points: Vec<(f64, f64)> = config
        .grid
        .iter()
        .map(|&i| i as f64)
        .zip(msd.iter().copied())
        .collect();
    Ok(StabilityReport {
        family: config.family.clone(),
        j_rule: config.j_rule,
        grid: config.grid.clone(),
        msd,
        msd_stderr,
        per_replicate,
        diverged,
        fit: fit_loglog_slope(&points),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear() -> GeneratorKind {
        GeneratorKind::CustomLinear {
            beta: vec![1.0, -0.5, 0.25],
            sigma: 0.5,
            covariate_radius: 1.0,
        }
    }

    fn config(family: StabilityFamily) -> StabilityConfig {
        StabilityConfig {
            family,
            generator: linear(),
            grid: vec![8, 16, 32, 64],
            j_rule: JRule::First,
            replicates: 4,
            n_test: 100,
            seed: 2,
            coupled_identical: false,
        }
    }

    #[test]
    fn constant_estimator_is_flagged() {
        let report = stability_curve(&config(StabilityFamily::Constant), 1).unwrap();
        assert!(report.msd.iter().all(|&m| m == 0.0));
        assert_eq!(report.fit.slope, None);
        assert_eq!(report.fit.excluded, 4);
    }

    #[test]
    fn coupled_twins_agree() {
        for rule in [JRule::First, JRule::Middle] {
            let mut c = config(StabilityFamily::Parametric { gamma: 0.5 });
            c.coupled_identical = true;
            c.j_rule = rule;
            let report = stability_curve(&c, 1).unwrap();
            assert!(report.msd.iter().all(|&m| m == 0.0));
        }
    }

    #[test]
    fn perturbation_shrinks() {
        let report =
            stability_curve(&config(StabilityFamily::Parametric { gamma: 0.5 }), 1).unwrap();
        assert!(report.msd.iter().all(|&m| m > 0.0));
        assert!(report.msd.windows(2).all(|w| w[1] < w[0]));
        assert!(report.fit.slope.unwrap() < 0.0);
    }

    #[test]
    fn middle_rule_index() {
        assert_eq!(JRule::Middle.index(8), 4);
        assert_eq!(JRule::Middle.index(9), 5);
        assert_eq!(JRule::First.index(9), 1);
    }

    #[test]
    fn batch_sieve_runs() {
        let mut c = config(StabilityFamily::BatchSieve { alpha: 1.0 / 3.0 });
        c.generator = GeneratorKind::Example1;
        let report = stability_curve(&c, 1).unwrap();
        assert!(report.msd.iter().all(|&m| m > 0.0));
    }

    #[test]
    fn divergence_is_counted() {
        let c = config(StabilityFamily::Sieve {
            schedule: ScheduleSieve::with_exponent(1e7, 1.0, 0.0, 0.51).unwrap(),
        });
        let err = stability_curve(&c, 1).unwrap_err();
        assert!(err.is_divergence());
    }

    #[test]
    fn invalid_grid() {
        let mut c = config(StabilityFamily::Constant);
        c.grid = vec![16, 8];
        assert!(stability_curve(&c, 1).is_err());
        c.grid = vec![1, 8];
        assert!(stability_curve(&c, 1).is_err());
    }

    #[test]
    fn power_bound_check() {
        let grid = [32, 64, 128];
        assert!(within_power_bound(&grid, &[1.0, 0.25, 0.0625], 2.0));
        assert!(within_power_bound(&grid, &[1.0, 0.25, 0.0625], 1.5));
        assert!(!within_power_bound(&grid, &[1.0, 0.5, 0.25], 1.5));
    }

    #[test]
    fn csv_layout() {
        let report =
            stability_curve(&config(StabilityFamily::Parametric { gamma: 0.5 }), 1).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("i,msd,msd_stderr\n8,"));
        let mut buf = Vec::new();
        report.write_summary_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("slope,slope_stderr,excluded_points\n"));
    }
}
