//! Run configuration: an optional TOML file merged under explicit flags.
//!
//! Every key is optional in the file. After flags are applied the resolved
//! configuration is written back as `config.toml` next to the outputs, and
//! passing that file to `--config` reproduces the run. The output directory
//! and thread count are run-location settings: they may appear in a config
//! file but are left out of the echo because they never change results.
//!
//! ```toml
//! command = "example1"
//! seed = 7
//! xi = [0.0, 1.0, 2.0]
//! replicates = 100
//! n_max = 10000
//! n_test = 1000
//! checkpoints = { geometric = { per_decade = 10 } }   # or { every = 100 }, { explicit = [...] }
//! loss = "squared"                                      # or { pinball = { alpha = 0.9 } }
//!
//! [generator]
//! kind = "example1"                                     # example2, custom_linear
//!
//! [[candidates]]
//! label = "s1"
//! family = "sieve"                                      # kernel, parametric, constant
//! s = 1.0
//! a = 0.1
//! b = 1.0
//! omega = 0.51
//! ```
//!
//! Stability runs use `grid`, `j_rule`, `coupled_identical` and a
//! `[stability]` table (`family = "parametric"` with `gamma`, `"sieve"` with a
//! `[stability.schedule]`, `"batch_sieve"` with `alpha`, or `"constant"`).
//! Quantile runs use `alpha = [lower, upper]`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wrv_core::experiments::{CandidateSpec, GeneratorKind, JRule, StabilityFamily};
use wrv_core::selection::CheckpointRule;
use wrv_core::LossKind;

use crate::error::{output_error, CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_test: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_rule: Option<JRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupled_identical: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<CheckpointRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<LossKind>,
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing)]
    pub jobs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilityFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<CandidateSpec>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Loads `path` if given and checks it was written for `command`.
    pub fn load_for(path: Option<&Path>, command: &str) -> CliResult<Self> {
        let config = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        match &config.command {
            Some(c) if c != command => Err(CliError::Config(format!(
                "config file is for `{c}`, not `{command}`"
            ))),
            _ => Ok(config),
        }
    }

    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))
    }

    /// Writes the echo `config.toml` into `dir`.
    pub fn echo(&self, dir: &Path) -> CliResult<()> {
        let path = dir.join("config.toml");
        fs::write(&path, self.to_toml()?).map_err(|e| output_error(&path, e))
    }
}

/// First of `flag`, `file`, `default`.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: impl FnOnce() -> T) -> T {
    flag.or(file).unwrap_or_else(default)
}

pub fn prepare_out_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| output_error(dir, e))
}
