//! Perturb-one stability curves from the command line.

use wrv_core::estimators::ScheduleSieve;
use wrv_core::experiments::{
    stability_curve, GeneratorKind, JRule, StabilityConfig, StabilityFamily, StabilityReport,
};

use super::{default_jobs, out_dir, write_file, write_text};
use crate::args::{FamilyArg, JRuleArg, StabilityArgs};
use crate::config::{pick, RunConfig};
use crate::error::CliResult;
use crate::svg::{Chart, Mark, Series};

pub const DEFAULT_REPLICATES: usize = 200;
pub const DEFAULT_N_TEST: usize = 2000;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_GAMMA: f64 = 0.5;
pub const DEFAULT_BATCH_ALPHA: f64 = 1.0 / 3.0;

/// `2^5, ..., 2^12`.
pub fn default_grid() -> Vec<u64> {
    (5..=12).map(|k| 1u64 << k).collect()
}

/// Well-conditioned `p = 3` linear law with `|X| <= 1`, so `gamma = 0.5`
/// satisfies `gamma <= 1 / R^2`.
pub fn linear_generator() -> GeneratorKind {
    GeneratorKind::CustomLinear {
        beta: vec![1.0, -0.5, 0.25],
        sigma: 0.5,
        covariate_radius: 1.0,
    }
}

/// `gamma_i = i^(-1/3)`, `J_i = i^(1/3)`, `omega = 0.51`: the `s = 1` schedule
/// with unit constants.
pub fn default_sieve_schedule() -> ScheduleSieve {
    ScheduleSieve::rate_optimal(1.0, 1.0, 1.0, 0.51).expect("valid constants")
}

fn family_for(arg: FamilyArg, alpha: Option<f64>) -> StabilityFamily {
    match arg {
        FamilyArg::Parametric => StabilityFamily::Parametric {
            gamma: DEFAULT_GAMMA,
        },
        FamilyArg::Sieve => StabilityFamily::Sieve {
            schedule: default_sieve_schedule(),
        },
        FamilyArg::BatchSieve => StabilityFamily::BatchSieve {
            alpha: alpha.unwrap_or(DEFAULT_BATCH_ALPHA),
        },
        FamilyArg::Constant => StabilityFamily::Constant,
    }
}

fn default_generator(family: &StabilityFamily) -> GeneratorKind {
    match family {
        StabilityFamily::Parametric { .. } => linear_generator(),
        _ => GeneratorKind::Example1,
    }
}

pub fn resolve(args: &StabilityArgs, file: RunConfig) -> RunConfig {
    let family = match (args.family, file.stability) {
        (Some(arg), _) => family_for(arg, args.alpha),
        (None, Some(StabilityFamily::BatchSieve { alpha })) => StabilityFamily::BatchSieve {
            alpha: args.alpha.unwrap_or(alpha),
        },
        (None, Some(f)) => f,
        (None, None) => family_for(FamilyArg::Parametric, args.alpha),
    };
    let j_rule = args.j_rule.map(|r| match r {
        JRuleArg::First => JRule::First,
        JRuleArg::Middle => JRule::Middle,
    });
    RunConfig {
        command: Some("stability".into()),
        seed: Some(pick(args.common.seed, file.seed, || DEFAULT_SEED)),
        replicates: Some(pick(args.reps, file.replicates, || DEFAULT_REPLICATES)),
        n_test: Some(pick(args.n_test, file.n_test, || DEFAULT_N_TEST)),
        grid: Some(pick(args.grid.clone(), file.grid, default_grid)),
        j_rule: Some(pick(j_rule, file.j_rule, JRule::default)),
        coupled_identical: Some(args.coupled_identical || file.coupled_identical.unwrap_or(false)),
        generator: Some(file.generator.unwrap_or_else(|| default_generator(&family))),
        stability: Some(family),
        ..RunConfig::default()
    }
}

pub fn run(args: StabilityArgs) -> CliResult<()> {
    let file = RunConfig::load_for(args.common.config.as_deref(), "stability")?;
    let jobs = pick(args.common.jobs, file.jobs, default_jobs);
    let out = out_dir(args.common.out.clone(), file.out.clone(), "stability")?;
    let resolved = resolve(&args, file);
    let config = StabilityConfig {
        family: resolved.stability.clone().expect("resolved"),
        generator: resolved.generator.clone().expect("resolved"),
        grid: resolved.grid.clone().expect("resolved"),
        j_rule: resolved.j_rule.expect("resolved"),
        replicates: resolved.replicates.expect("resolved"),
        n_test: resolved.n_test.expect("resolved"),
        seed: resolved.seed.expect("resolved"),
        coupled_identical: resolved.coupled_identical.expect("resolved"),
    };
    config.validate()?;
    resolved.echo(&out)?;

    let report = stability_curve(&config, jobs)?;
    write_file(&out.join("stability.csv"), |w| Ok(report.write_csv(w)?))?;
    write_file(&out.join("stability_summary.csv"), |w| {
        Ok(report.write_summary_csv(w)?)
    })?;
    write_text(&out.join("stability.svg"), &chart(&report).render())?;

    if report.diverged > 0 {
        eprintln!(
            "warning: {} of {} replicates diverged and were dropped",
            report.diverged, config.replicates
        );
    }
    if report.fit.excluded > 0 {
        eprintln!(
            "warning: {} grid points with zero msd excluded from the fit",
            report.fit.excluded
        );
    }
    match (report.fit.slope, report.fit.stderr) {
        (Some(slope), Some(se)) => println!("slope = {slope:.4} (stderr {se:.4})"),
        (Some(slope), None) => {
            println!("slope = {slope:.4} (stderr undefined)");
            eprintln!(
                "warning: slope standard error is degenerate with fewer than 3 usable points"
            );
        }
        (None, _) => {
            println!("slope undefined");
            eprintln!("warning: fewer than 2 grid points with positive msd; no slope fitted");
        }
    }
    Ok(())
}

fn chart(report: &StabilityReport) -> Chart {
    let points: Vec<(f64, f64)> = report
        .grid
        .iter()
        .map(|&i| i as f64)
        .zip(report.msd.iter().copied())
        .collect();
    let mut series = vec![Series::new("msd", points.clone(), Mark::Line)];
    let mut notes = Vec::new();
    if let Some(slope) = report.fit.slope {
        // least-squares line through the positive points
        let logs: Vec<(f64, f64)> = points
            .iter()
            .filter(|p| p.1 > 0.0)
            .map(|&(i, m)| (i.ln(), m.ln()))
            .collect();
        let n = logs.len() as f64;
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
        let fitted = points
            .iter()
            .map(|&(i, _)| (i, (my + slope * (i.ln() - mx)).exp()))
            .collect();
        series.push(Series::new("fit", fitted, Mark::Dashed));
        notes.push(match report.fit.stderr {
            Some(se) => format!("slope {slope:.3} +/- {se:.3}"),
            None => format!("slope {slope:.3} (no stderr)"),
        });
    } else {
        notes.push("slope undefined".into());
    }
    Chart {
        title: "Perturb-one stability".into(),
        x_label: "i".into(),
        y_label: "mean squared difference".into(),
        log_x: true,
        log_y: true,
        series,
        notes,
    }
}
