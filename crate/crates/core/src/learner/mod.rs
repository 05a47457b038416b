//! Synthetic training task standing in for a network's per-sample losses.
//!
//! Each sample's loss shrinks geometrically with every visit and grows back
//! while the sample is left alone, which is enough to exhibit both
//! diminishing returns and forgetting. [`run_experiment`] drives the task with
//! the curriculum sampler or one of two baselines and reports per-epoch
//! metrics on the noise-free losses.

mod experiment;
mod task;

pub use experiment::{run_experiment, time_to_target, EpochReport, Strategy};
pub use task::{SyntheticTask, TaskSpec};
