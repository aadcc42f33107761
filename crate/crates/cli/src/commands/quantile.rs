//! Quantile band: two pinball-loss selections on one training stream, and the
//! empirical coverage of the band on fresh samples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wrv_core::estimators::Estimator;
use wrv_core::experiments::{
    derive_seed, CandidateSpecTable, GeneratorKind, STREAM_DATA, STREAM_TEST,
};
use wrv_core::selection::{CandidatePool, IndependentPool, SelectionHarness};
use wrv_core::{LossKind, Sample};

use super::{out_dir, write_file, write_text};
use crate::args::QuantileArgs;
use crate::config::{pick, RunConfig};
use crate::error::{output_error, CliError, CliResult};
use crate::svg::{Chart, Mark, Series};

pub const DEFAULT_ALPHA: [f64; 2] = [0.05, 0.95];
pub const DEFAULT_N: u64 = 1000;
pub const DEFAULT_XI: f64 = 1.0;
pub const DEFAULT_N_TEST: usize = 10_000;
pub const DEFAULT_SEED: u64 = 1;
const PLOT_POINTS: usize = 200;
const PLOT_SAMPLES: usize = 500;

type Harness = SelectionHarness<IndependentPool<Estimator>>;

pub fn resolve(args: &QuantileArgs, file: RunConfig) -> CliResult<RunConfig> {
    let alpha = pick(args.alpha.clone(), file.alpha, || DEFAULT_ALPHA.to_vec());
    match alpha[..] {
        [lo, hi] if lo > 0.0 && hi < 1.0 && lo <= hi => {}
        _ => {
            return Err(CliError::Config(format!(
                "alpha must be two levels `lower,upper` with 0 < lower <= upper < 1, got {alpha:?}"
            )))
        }
    }
    let xi = match (args.xi, file.xi.as_deref()) {
        (Some(xi), _) => xi,
        (None, Some([xi])) => *xi,
        (None, Some(list)) => {
            return Err(CliError::Config(format!(
                "quantile uses one weight exponent, config lists {}",
                list.len()
            )))
        }
        (None, None) => DEFAULT_XI,
    };
    Ok(RunConfig {
        command: Some("quantile".into()),
        seed: Some(pick(args.common.seed, file.seed, || DEFAULT_SEED)),
        alpha: Some(alpha),
        xi: Some(vec![xi]),
        n_max: Some(pick(args.n, file.n_max, || DEFAULT_N)),
        n_test: Some(pick(args.n_test, file.n_test, || DEFAULT_N_TEST)),
        generator: Some(file.generator.unwrap_or(GeneratorKind::Example1)),
        candidates: Some(
            file.candidates
                .unwrap_or_else(|| CandidateSpecTable::example1().rows().to_vec()),
        ),
        ..RunConfig::default()
    })
}

/// Outcome of a quantile run.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub label_lower: String,
    pub label_upper: String,
    pub n_test: usize,
    /// Fraction of test responses strictly inside the band.
    pub coverage: f64,
}

pub fn run(args: QuantileArgs) -> CliResult<()> {
    let file = RunConfig::load_for(args.common.config.as_deref(), "quantile")?;
    let out = out_dir(args.common.out.clone(), file.out.clone(), "quantile")?;
    let resolved = resolve(&args, file)?;
    let alpha = resolved.alpha.clone().expect("resolved");
    let (alpha_lo, alpha_hi) = (alpha[0], alpha[1]);
    let generator = resolved.generator.clone().expect("resolved");
    generator.validate()?;
    let table = CandidateSpecTable::new(resolved.candidates.clone().expect("resolved"))?;
    let xi = resolved.xi.as_ref().expect("resolved")[0];
    let n = resolved.n_max.expect("resolved");
    let n_test = resolved.n_test.expect("resolved");
    if n < 2 || n_test == 0 {
        return Err(CliError::Config("need n >= 2 and n_test >= 1".into()));
    }
    let seed = resolved.seed.expect("resolved");
    resolved.echo(&out)?;

    let p = generator.dimension();
    let harness = |alpha: f64| -> CliResult<Harness> {
        let loss = LossKind::pinball(alpha)?;
        let pool = IndependentPool::new(table.build(p, loss)?)?;
        Ok(SelectionHarness::new(pool, table.labels(), loss, xi)?)
    };
    let mut lower = harness(alpha_lo)?;
    let mut upper = harness(alpha_hi)?;
    let mut training = Vec::new();
    for sample in generator.stream(derive_seed(seed, STREAM_DATA, 0), n)? {
        let sample = sample?;
        lower.step(&sample)?;
        upper.step(&sample)?;
        if training.len() < PLOT_SAMPLES {
            training.push(sample);
        }
    }

    let (k_lo, k_hi) = (lower.selected_index(0), upper.selected_index(0));
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STREAM_TEST, 0));
    let mut inside = 0usize;
    for _ in 0..n_test {
        let s: Sample = generator.draw(&mut rng);
        let lo = lower.pool().predict(k_lo, &s.x)?;
        let hi = upper.pool().predict(k_hi, &s.x)?;
        if lo < s.y && s.y < hi {
            inside += 1;
        }
    }
    let band = Band {
        label_lower: lower.labels()[k_lo].clone(),
        label_upper: upper.labels()[k_hi].clone(),
        n_test,
        coverage: inside as f64 / n_test as f64,
    };

    let path = out.join("coverage.csv");
    write_file(&path, |w| {
        use std::io::Write;
        let io = |e| output_error(&path, e);
        writeln!(
            w,
            "alpha_lower,alpha_upper,label_lower,label_upper,n_train,n_test,coverage"
        )
        .map_err(io)?;
        writeln!(
            w,
            "{alpha_lo},{alpha_hi},{},{},{n},{n_test},{}",
            band.label_lower, band.label_upper, band.coverage
        )
        .map_err(io)
    })?;
    if p == 1 {
        let chart = band_chart(&training, &lower, &upper, k_lo, k_hi, alpha_lo, alpha_hi)?;
        write_text(&out.join("quantile.svg"), &chart.render())?;
    }
    println!(
        "band [{alpha_lo}, {alpha_hi}] from `{}` and `{}`: coverage {:.4} on {n_test} test samples (nominal {:.2})",
        band.label_lower,
        band.label_upper,
        band.coverage,
        alpha_hi - alpha_lo
    );
    Ok(())
}

fn band_chart(
    training: &[Sample],
    lower: &Harness,
    upper: &Harness,
    k_lo: usize,
    k_hi: usize,
    alpha_lo: f64,
    alpha_hi: f64,
) -> CliResult<Chart> {
    let dots = training.iter().map(|s| (s.x[0], s.y)).collect();
    let curve = |h: &Harness, k: usize| -> CliResult<Vec<(f64, f64)>> {
        (0..=PLOT_POINTS)
            .map(|i| {
                let x = i as f64 / PLOT_POINTS as f64;
                Ok((x, h.pool().predict(k, &[x])?))
            })
            .collect()
    };
    Ok(Chart {
        title: "Selected quantile band".into(),
        x_label: "x".into(),
        y_label: "y".into(),
        series: vec![
            Series::new("training", dots, Mark::Dots),
            Series::new(
                format!("q{alpha_lo} ({})", lower.labels()[k_lo]),
                curve(lower, k_lo)?,
                Mark::Line,
            ),
            Series::new(
                format!("q{alpha_hi} ({})", upper.labels()[k_hi]),
                curve(upper, k_hi)?,
                Mark::Line,
            ),
        ],
        ..Chart::default()
    })
}
