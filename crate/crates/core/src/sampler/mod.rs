//! Per-sample loss bookkeeping and the per-epoch sampling distribution.
//!
//! The pipeline for one epoch is
//!
//! 1. [`weight`] for every sample (`mean(recent losses) + alpha / sqrt(visits)`),
//! 2. [`rescale_weights`] to `[0, 1]`, unvisited samples taking the cohort maximum,
//! 3. [`distribution`]: `(1 - eps) * softmax(w) + eps / n`,
//! 4. [`sample_epoch`]: `n_epoch` i.i.d. draws, then [`make_batches`].
//!
//! [`SamplerRegistry`] owns the states and runs the whole cycle.

mod config;
mod distribution;
mod oplog;
mod registry;
mod state;

pub use config::{CurriculumConfig, ExplorationBonus};
pub use distribution::{distribution, make_batches, rescale_weights, sample_epoch, uniform};
pub use oplog::{format_log, parse_log, Operation};
pub use registry::SamplerRegistry;
pub use state::{weight, SampleState, Weight};
