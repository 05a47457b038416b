//! Curriculum sampling driven by a bandit-style priority.
//!
//! Every training sample carries a short window of recent losses and a visit
//! count. Once per epoch the sampler turns these into a priority
//! `w = mean(window) + alpha / sqrt(visits)`, rescales the priorities to
//! `[0, 1]`, passes them through a softmax mixed with a uniform floor `epsilon`,
//! and draws a fixed number of samples with replacement. Rarely visited samples
//! keep a growing bonus, so nothing learned early is abandoned for good.
//!
//! Alongside the sampler live:
//!
//! - [`anchors`]: an easy-to-hard schedule for choosing negative anchors by
//!   the model's confidence,
//! - [`bandit`]: a small multi-armed bandit lab (UCB1, the softmax curriculum
//!   policy, regret accounting, the UCB1 regret bound, reward rescaling for
//!   decaying rewards),
//! - [`learner`]: a synthetic training task used to compare the curriculum
//!   against uniform sampling and greedy hard mining,
//! - [`stats`]: the two-sample Kolmogorov-Smirnov test and a few summaries.

pub mod anchors;
pub mod bandit;
pub mod error;
pub mod learner;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
pub use sampler::{
    distribution, make_batches, rescale_weights, sample_epoch, weight, CurriculumConfig, SampleState, SamplerRegistry,
    Weight,
};
