//! Online selection over CSV rows `x1,...,xp,y`.
//!
//! The log gets one row at every checkpoint and a final row at end of input.
//! A snapshot stores the harness, the resolved configuration and the log, so
//! a resumed run reproduces the uninterrupted one exactly.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wrv_core::estimators::Estimator;
use wrv_core::experiments::CandidateSpecTable;
use wrv_core::selection::{IndependentPool, SelectionHarness};
use wrv_core::Sample;

use super::{default_jobs, out_dir};
use crate::args::StreamArgs;
use crate::config::{pick, RunConfig};
use crate::error::{output_error, CliError, CliResult};

pub const SNAPSHOT_VERSION: u32 = 1;

type Harness = SelectionHarness<IndependentPool<Estimator>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub n: u64,
    pub selected: String,
    pub rv: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Snapshot {
    pub version: u32,
    /// Input rows already folded into `harness`.
    pub consumed: u64,
    pub config: RunConfig,
    pub harness: Option<Harness>,
    pub log: Vec<LogRow>,
}

impl Snapshot {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read snapshot {}: {e}", path.display()))
        })?;
        let snap: Snapshot = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("snapshot {}: {e}", path.display())))?;
        if snap.version != SNAPSHOT_VERSION {
            return Err(CliError::Config(format!(
                "snapshot version {} is not supported (expected {SNAPSHOT_VERSION})",
                snap.version
            )));
        }
        Ok(snap)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        let text = serde_json::to_string(self).map_err(|e| output_error(path, e))?;
        std::fs::write(path, text).map_err(|e| output_error(path, e))
    }
}

/// Configuration of a fresh run: candidates must come from the config file,
/// and exactly one weight exponent from `--xi` or the file.
pub fn resolve(args: &StreamArgs, file: RunConfig) -> CliResult<RunConfig> {
    let candidates = file.candidates.clone().ok_or_else(|| {
        CliError::Config("stream needs a `[[candidates]]` table in --config".into())
    })?;
    CandidateSpecTable::new(candidates.clone())?;
    let xi = match (args.xi, file.xi.as_deref()) {
        (Some(xi), _) => xi,
        (None, Some([xi])) => *xi,
        (None, Some(list)) => {
            return Err(CliError::Config(format!(
                "stream tracks one weight exponent, config lists {}",
                list.len()
            )))
        }
        (None, None) => 1.0,
    };
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(CliError::Config(format!(
            "xi must be finite and >= 0, got {xi}"
        )));
    }
    let loss = file.loss.unwrap_or_default();
    loss.validate()?;
    Ok(RunConfig {
        command: Some("stream".into()),
        xi: Some(vec![xi]),
        checkpoints: Some(file.checkpoints.unwrap_or_default()),
        loss: Some(loss),
        candidates: Some(candidates),
        ..RunConfig::default()
    })
}

fn build_harness(config: &RunConfig, dimension: usize, parallel: bool) -> CliResult<Harness> {
    let table = CandidateSpecTable::new(config.candidates.clone().unwrap_or_default())?;
    let loss = config.loss.unwrap_or_default();
    let pool = IndependentPool::new(table.build(dimension, loss)?)?.with_parallel(parallel);
    let xi = config
        .xi
        .as_ref()
        .and_then(|v| v.first().copied())
        .unwrap_or(1.0);
    Ok(SelectionHarness::new(pool, table.labels(), loss, xi)?)
}

/// Parses one record; `row` is 1-based for messages.
fn parse_row(record: &csv::StringRecord, row: u64, dimension: Option<usize>) -> CliResult<Sample> {
    if record.len() < 2 {
        return Err(CliError::Data(format!(
            "row {row}: expected at least one covariate and a response, got {} field(s)",
            record.len()
        )));
    }
    let values = record
        .iter()
        .enumerate()
        .map(|(c, field)| {
            let v: f64 = field.trim().parse().map_err(|_| {
                CliError::Data(format!(
                    "row {row}, column {}: `{field}` is not a number",
                    c + 1
                ))
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(CliError::Data(format!(
                    "row {row}, column {}: non-finite value",
                    c + 1
                )))
            }
        })
        .collect::<CliResult<Vec<f64>>>()?;
    let p = values.len() - 1;
    if let Some(d) = dimension {
        if d != p {
            return Err(CliError::Data(format!(
                "row {row}: {p} covariates, earlier rows have {d}"
            )));
        }
    }
    let mut x = values;
    let y = x.pop().expect("two or more fields");
    Ok(Sample::new(x, y))
}

struct Log {
    path: PathBuf,
    w: BufWriter<File>,
}

impl Log {
    fn create(path: PathBuf, labels: &[String], rows: &[LogRow]) -> CliResult<Self> {
        let file = File::create(&path).map_err(|e| output_error(&path, e))?;
        let mut log = Self {
            w: BufWriter::new(file),
            path,
        };
        let header: Vec<String> = labels.iter().map(|l| format!("rv_{l}")).collect();
        log.line(&format!("n,selected_label,{}", header.join(",")))?;
        for row in rows {
            log.push(row)?;
        }
        Ok(log)
    }

    fn line(&mut self, text: &str) -> CliResult<()> {
        writeln!(self.w, "{text}").map_err(|e| output_error(&self.path, e))
    }

    fn push(&mut self, row: &LogRow) -> CliResult<()> {
        let rv: Vec<String> = row.rv.iter().map(f64::to_string).collect();
        self.line(&format!("{},{},{}", row.n, row.selected, rv.join(",")))?;
        self.w.flush().map_err(|e| output_error(&self.path, e))
    }
}

fn log_row(h: &Harness) -> LogRow {
    LogRow {
        n: h.samples_seen(),
        selected: h.current_selection().to_string(),
        rv: h.rv_values(0),
    }
}

fn open_input(input: &str) -> CliResult<Box<dyn Read>> {
    if input == "-" {
        Ok(Box::new(io::stdin()))
    } else {
        File::open(input)
            .map(|f| Box::new(f) as Box<dyn Read>)
            .map_err(|e| CliError::Data(format!("cannot open {input}: {e}")))
    }
}

pub fn run(args: StreamArgs) -> CliResult<()> {
    let mut snap = match &args.resume {
        Some(path) => {
            if args.common.config.is_some() || args.xi.is_some() {
                return Err(CliError::Config(
                    "--resume takes its configuration from the snapshot; drop --config and --xi"
                        .into(),
                ));
            }
            Snapshot::load(path)?
        }
        None => {
            let file = RunConfig::load_for(args.common.config.as_deref(), "stream")?;
            Snapshot {
                version: SNAPSHOT_VERSION,
                consumed: 0,
                config: resolve(&args, file)?,
                harness: None,
                log: Vec::new(),
            }
        }
    };
    let jobs = pick(args.common.jobs, None, default_jobs);
    let out = out_dir(args.common.out.clone(), None, "stream")?;
    snap.config.echo(&out)?;
    let checkpoints = snap.config.checkpoints.clone().unwrap_or_default();
    let labels =
        CandidateSpecTable::new(snap.config.candidates.clone().unwrap_or_default())?.labels();
    let mut log = Log::create(out.join("selection_log.csv"), &labels, &snap.log)?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(open_input(&args.input)?);
    let mut dimension = snap.harness.as_ref().map(h_dimension);
    let mut row = 0u64;
    let mut interrupted = false;
    let mut record = csv::StringRecord::new();
    loop {
        if args.max_rows.is_some_and(|m| snap.consumed >= m) {
            interrupted = true;
            break;
        }
        let more = reader
            .read_record(&mut record)
            .map_err(|e| CliError::Data(format!("row {}: {e}", row + 1)))?;
        if !more {
            break;
        }
        row += 1;
        if row <= snap.consumed {
            continue;
        }
        let sample = parse_row(&record, row, dimension)?;
        let harness = match &mut snap.harness {
            Some(h) => h,
            None => {
                dimension = Some(sample.dimension());
                snap.harness
                    .insert(build_harness(&snap.config, sample.dimension(), jobs > 1)?)
            }
        };
        harness.step(&sample)?;
        snap.consumed += 1;
        if checkpoints.contains(harness.samples_seen()) {
            let entry = log_row(harness);
            log.push(&entry)?;
            snap.log.push(entry);
        }
    }

    if !interrupted && row < snap.consumed {
        return Err(CliError::Data(format!(
            "input has {row} rows but the snapshot already consumed {}",
            snap.consumed
        )));
    }
    let Some(harness) = &snap.harness else {
        return Err(CliError::Data("input contains no rows".into()));
    };
    if !interrupted && snap.log.last().map(|r| r.n) != Some(harness.samples_seen()) {
        let entry = log_row(harness);
        log.push(&entry)?;
        snap.log.push(entry);
    }
    println!(
        "n={}: selected `{}`{}",
        harness.samples_seen(),
        harness.current_selection(),
        if interrupted { " (stopped early)" } else { "" }
    );
    if let Some(path) = &args.snapshot {
        snap.save(path)?;
    }
    Ok(())
}

fn h_dimension(h: &Harness) -> usize {
    use wrv_core::selection::CandidatePool;
    h.pool().dimension()
}
