//! Simulation studies: data generators, candidate presets, replicated
//! selection runs and perturb-one stability curves.

mod candidates;
mod generators;
mod oracle;
mod replicates;
mod slope;
mod stability;

pub use candidates::{CandidateSpec, CandidateSpecTable, Family, PRESET_OMEGA};
pub use generators::{
    derive_seed, example1_f0, gen_example1, gen_example2, GeneratorKind, GeneratorSpec,
    STREAM_DATA, STREAM_REPLACEMENT, STREAM_TEST,
};
pub use oracle::{oracle_mse, OracleTestSet};
pub use replicates::{
    run_replicates, run_replicates_with, run_single_replicate, AggregateTrace, ExperimentConfig,
    ReplicateResult,
};
pub use slope::{fit_loglog_slope, SlopeFit};
pub use stability::{
    stability_curve, within_power_bound, JRule, StabilityConfig, StabilityFamily, StabilityReport,
};
