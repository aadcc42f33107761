//! Replicated selection studies on the two synthetic examples.

use wrv_core::experiments::{
    run_replicates_with, AggregateTrace, CandidateSpecTable, ExperimentConfig, GeneratorKind,
};
use wrv_core::LossKind;

use super::{default_jobs, out_dir, write_file, write_text};
use crate::args::ExperimentArgs;
use crate::config::{pick, RunConfig};
use crate::error::{output_error, CliError, CliResult};
use crate::svg::{Chart, Mark, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Example1,
    Example2,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Example1 => "example1",
            Preset::Example2 => "example2",
        }
    }

    fn generator(self) -> GeneratorKind {
        match self {
            Preset::Example1 => GeneratorKind::Example1,
            Preset::Example2 => GeneratorKind::Example2,
        }
    }

    fn candidates(self) -> CandidateSpecTable {
        match self {
            Preset::Example1 => CandidateSpecTable::example1(),
            Preset::Example2 => CandidateSpecTable::example2(),
        }
    }
}

pub const DEFAULT_REPLICATES: usize = 100;
pub const DEFAULT_N: u64 = 10_000;
pub const FULL_SCALE_REPLICATES: usize = 500;
/// `10^4.5`, rounded.
pub const FULL_SCALE_N: u64 = 31_623;
pub const DEFAULT_N_TEST: usize = 1000;
pub const DEFAULT_SEED: u64 = 1;

/// Merges flags over the config file and fills the remaining defaults.
pub fn resolve(preset: Preset, args: &ExperimentArgs, file: RunConfig) -> RunConfig {
    let (reps, n) = if args.paper_scale {
        (FULL_SCALE_REPLICATES, FULL_SCALE_N)
    } else {
        (DEFAULT_REPLICATES, DEFAULT_N)
    };
    RunConfig {
        command: Some(preset.name().into()),
        seed: Some(pick(args.common.seed, file.seed, || DEFAULT_SEED)),
        xi: Some(pick(args.xi.clone(), file.xi, || vec![0.0, 1.0, 2.0])),
        replicates: Some(pick(args.reps, file.replicates, || reps)),
        n_max: Some(pick(args.n, file.n_max, || n)),
        n_test: Some(pick(args.n_test, file.n_test, || DEFAULT_N_TEST)),
        checkpoints: Some(file.checkpoints.unwrap_or_default()),
        loss: Some(file.loss.unwrap_or_default()),
        generator: Some(file.generator.unwrap_or_else(|| preset.generator())),
        candidates: Some(
            file.candidates
                .unwrap_or_else(|| preset.candidates().rows().to_vec()),
        ),
        ..RunConfig::default()
    }
}

fn experiment_config(resolved: &RunConfig) -> CliResult<ExperimentConfig> {
    let candidates = CandidateSpecTable::new(resolved.candidates.clone().unwrap_or_default())?;
    let config = ExperimentConfig {
        generator: resolved.generator.clone().expect("resolved"),
        candidates,
        loss: resolved.loss.unwrap_or(LossKind::Squared),
        xis: resolved.xi.clone().expect("resolved"),
        n_max: resolved.n_max.expect("resolved"),
        replicates: resolved.replicates.expect("resolved"),
        checkpoints: resolved.checkpoints.clone().unwrap_or_default(),
        seed: resolved.seed.expect("resolved"),
        oracle_n_test: resolved.n_test.filter(|&n| n > 0),
    };
    config.validate()?;
    Ok(config)
}

pub fn run(preset: Preset, args: ExperimentArgs) -> CliResult<()> {
    let file = RunConfig::load_for(args.common.config.as_deref(), preset.name())?;
    let jobs = pick(args.common.jobs, file.jobs, default_jobs);
    let out = out_dir(args.common.out.clone(), file.out.clone(), preset.name())?;
    let resolved = resolve(preset, &args, file);
    let config = experiment_config(&resolved)?;
    resolved.echo(&out)?;

    let aggregate_path = out.join("aggregate.csv");
    let trace = run_replicates_with(&config, jobs, |partial| {
        write_file(&aggregate_path, |w| Ok(partial.write_csv(w)?))?;
        eprintln!(
            "{}: {}/{} replicates",
            preset.name(),
            partial.replicates,
            config.replicates
        );
        Ok::<(), CliError>(())
    })?;
    write_artifacts(&trace, &out)?;
    for (x, xi) in trace.xis.iter().enumerate() {
        let last = trace.checkpoints.len() - 1;
        let freq = &trace.selection_freq[x][last];
        let best = (0..freq.len()).fold(0, |b, k| if freq[k] > freq[b] { k } else { b });
        println!(
            "xi={xi}: most selected at n={} is `{}` ({:.0}% of replicates)",
            trace.checkpoints[last],
            trace.labels[best],
            100.0 * freq[best]
        );
    }
    Ok(())
}

/// Aggregate CSV, oracle CSV and the rank and error charts.
pub fn write_artifacts(trace: &AggregateTrace, out: &std::path::Path) -> CliResult<()> {
    let aggregate_path = out.join("aggregate.csv");
    write_file(&aggregate_path, |w| Ok(trace.write_csv(w)?))?;
    let log_n: Vec<f64> = trace
        .checkpoints
        .iter()
        .map(|&n| (n as f64).log10())
        .collect();

    for (x, xi) in trace.xis.iter().enumerate() {
        let series = trace
            .labels
            .iter()
            .enumerate()
            .map(|(k, label)| {
                let pts = log_n
                    .iter()
                    .zip(&trace.mean_rank[x])
                    .map(|(&l, row)| (l, row[k]))
                    .collect();
                Series::new(label.clone(), pts, Mark::Line)
            })
            .collect();
        let chart = Chart {
            title: format!("Mean rank by weighted RV, xi = {xi}"),
            x_label: "log10(n)".into(),
            y_label: "mean rank".into(),
            series,
            ..Chart::default()
        };
        write_text(&out.join(format!("rank_xi{xi}.svg")), &chart.render())?;
    }

    if let (Some(mse), Some(rank)) = (&trace.oracle_mse, &trace.oracle_mean_rank) {
        let path = out.join("oracle.csv");
        write_file(&path, |w| {
            use std::io::Write;
            let io = |e| output_error(&path, e);
            writeln!(
                w,
                "checkpoint_n,candidate_label,oracle_mse,oracle_mean_rank"
            )
            .map_err(io)?;
            for (c, n) in trace.checkpoints.iter().enumerate() {
                for (k, label) in trace.labels.iter().enumerate() {
                    writeln!(w, "{n},{label},{},{}", mse[c][k], rank[c][k]).map_err(io)?;
                }
            }
            Ok(())
        })?;
        let series = trace
            .labels
            .iter()
            .enumerate()
            .map(|(k, label)| {
                let pts = trace
                    .checkpoints
                    .iter()
                    .zip(mse)
                    .map(|(&n, row)| (n as f64, row[k]))
                    .collect();
                Series::new(label.clone(), pts, Mark::Line)
            })
            .collect();
        let chart = Chart {
            title: "Oracle estimation error".into(),
            x_label: "n".into(),
            y_label: "mean squared error".into(),
            log_x: true,
            log_y: true,
            series,
            ..Chart::default()
        };
        write_text(&out.join("oracle_mse.svg"), &chart.render())?;
    }
    Ok(())
}
