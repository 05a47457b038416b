use rand::Rng;
use serde::{Deserialize, Serialize};

use super::task::SyntheticTask;
use crate::error::{Error, Result};
use crate::sampler::{make_batches, sample_epoch, uniform, CurriculumConfig, SamplerRegistry};

/// How the samples of an epoch are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// The bandit-weighted sampler.
    Curriculum,
    Uniform,
    /// Equal mass on the `n_epoch` samples with the highest last-seen loss;
    /// unseen samples rank first. No exploration.
    GreedyHardMining,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Curriculum, Strategy::Uniform, Strategy::GreedyHardMining];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Curriculum => "curriculum",
            Strategy::Uniform => "uniform",
            Strategy::GreedyHardMining => "greedy_hard_mining",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Metrics after one epoch, on noise-free losses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochReport {
    pub epoch: u64,
    pub mean_true_loss: f64,
    pub max_true_loss: f64,
    /// Draws per sample during the epoch.
    pub selection_histogram: Vec<u32>,
    /// Epochs since the least recently visited sample was last seen.
    pub max_staleness: u64,
}

fn greedy_distribution(registry: &SamplerRegistry, n_epoch: usize) -> Vec<f64> {
    let n = registry.len();
    let mut order: Vec<usize> = (0..n).collect();
    let key = |i: usize| registry.states()[i].last_loss().unwrap_or(f64::INFINITY);
    order.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(a.cmp(&b)));
    let top = n_epoch.min(n);
    let mut probs = vec![0.0; n];
    for &i in &order[..top] {
        probs[i] = 1.0 / top as f64;
    }
    probs
}

/// Trains a copy of `task` for `max_epochs` epochs under `strategy`.
///
/// Each epoch draws `config.n_epoch` samples, groups them into batches,
/// observes a loss per draw and feeds the losses back to the sampler state.
pub fn run_experiment<R: Rng + ?Sized>(
    task: &SyntheticTask,
    strategy: Strategy,
    max_epochs: u64,
    config: &CurriculumConfig,
    rng: &mut R,
) -> Result<Vec<EpochReport>> {
    if max_epochs == 0 {
        return Err(Error::invalid("max_epochs", "must be at least 1"));
    }
    let mut task = task.clone();
    let n = task.n_samples();
    let mut registry = SamplerRegistry::new(n, config.clone())?;
    let mut reports = Vec::with_capacity(max_epochs as usize);

    for epoch in 0..max_epochs {
        let batches = match strategy {
            Strategy::Curriculum => registry.next_epoch(rng)?,
            Strategy::Uniform => make_batches(&sample_epoch(&uniform(n)?, config.n_epoch, rng)?, config.batch_size)?,
            Strategy::GreedyHardMining => {
                let probs = greedy_distribution(&registry, config.n_epoch);
                make_batches(&sample_epoch(&probs, config.n_epoch, rng)?, config.batch_size)?
            }
        };

        let mut histogram = vec![0u32; n];
        let mut pairs = Vec::with_capacity(config.batch_size);
        for batch in &batches {
            pairs.clear();
            for &id in batch {
                histogram[id] += 1;
                pairs.push((id, task.observe_loss(id, rng)?));
            }
            registry.report_losses(&pairs)?;
        }
        task.end_epoch();

        let losses = task.true_losses();
        reports.push(EpochReport {
            epoch,
            mean_true_loss: losses.iter().sum::<f64>() / n as f64,
            max_true_loss: losses.iter().copied().fold(0.0, f64::max),
            selection_histogram: histogram,
            max_staleness: task.max_staleness(),
        });
    }
    Ok(reports)
}

/// First epoch whose mean true loss is at or below `target`.
pub fn time_to_target(reports: &[EpochReport], target: f64) -> Result<Option<u64>> {
    if !(target.is_finite() && target > 0.0) {
        return Err(Error::invalid("target", format!("must be positive, got {target}")));
    }
    Ok(reports.iter().find(|r| r.mean_true_loss <= target).map(|r| r.epoch))
}
