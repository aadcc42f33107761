//! Weighted rolling validation and the online selection harness.

mod harness;
mod pool;
mod trace;
mod tracker;

pub(crate) use harness::argmin;
pub use harness::SelectionHarness;
pub use pool::{CandidateFailure, CandidatePool, IndependentPool, SharedKernelPool};
pub use trace::{tied_ranks, CheckpointRule, SelectionTrace};
pub use tracker::RvTracker;
