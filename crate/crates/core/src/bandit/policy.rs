use rand::Rng;
use serde::{Deserialize, Serialize};

use super::env::BanditEnv;
use crate::error::{Error, Result};
use crate::sampler::{sample_epoch, CurriculumConfig, ExplorationBonus, SamplerRegistry};

/// Arm-selection rule. Every policy starts by pulling each arm once in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Policy {
    /// Always the arm with the largest `mean reward + bonus`.
    Ucb1Greedy {
        alpha: f64,
        bonus: ExplorationBonus,
    },
    /// Arms are treated as samples of the curriculum sampler: the reward is
    /// the arm's loss signal and each step draws from the sampler's
    /// distribution.
    CurriculumSoftmax {
        config: CurriculumConfig,
    },
    Uniform,
    /// Always the arm with the largest mean over its last `window_c` rewards.
    GreedyLoss {
        window_c: usize,
    },
}

impl Policy {
    /// Classical UCB1: `mean + sqrt(2 ln t / n_i)`.
    pub fn ucb1() -> Self {
        Policy::Ucb1Greedy {
            alpha: 1.0,
            bonus: ExplorationBonus::Ucb1,
        }
    }

    /// Softmax curriculum policy with the sampler's default hyperparameters.
    pub fn curriculum_softmax() -> Self {
        let mut config = CurriculumConfig::for_dataset(1);
        config.batch_size = 1;
        Policy::CurriculumSoftmax { config }
    }

    pub fn greedy_loss() -> Self {
        Policy::GreedyLoss {
            window_c: CurriculumConfig::DEFAULT_WINDOW,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Policy::Ucb1Greedy { .. } => "ucb1_greedy",
            Policy::CurriculumSoftmax { .. } => "curriculum_softmax",
            Policy::Uniform => "uniform",
            Policy::GreedyLoss { .. } => "greedy_loss",
        }
    }

    /// Builds the policy named `name` with default parameters.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "ucb1_greedy" => Ok(Self::ucb1()),
            "curriculum_softmax" => Ok(Self::curriculum_softmax()),
            "uniform" => Ok(Policy::Uniform),
            "greedy_loss" => Ok(Self::greedy_loss()),
            other => Err(Error::invalid("policy", format!("unknown policy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pull {
    pub step: u64,
    pub arm: usize,
    pub reward: f64,
}

/// Pull history of one run with its running expected regret.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyTrace {
    pub policy: String,
    pub pulls: Vec<Pull>,
    /// `cumulative_regret[k]` is the regret after `k + 1` pulls.
    pub cumulative_regret: Vec<f64>,
}

impl PolicyTrace {
    pub fn horizon(&self) -> usize {
        self.pulls.len()
    }

    pub fn regret(&self) -> f64 {
        self.cumulative_regret.last().copied().unwrap_or(0.0)
    }

    /// Regret after the first `n` pulls.
    pub fn regret_at(&self, n: usize) -> Option<f64> {
        match n {
            0 => Some(0.0),
            n => self.cumulative_regret.get(n - 1).copied(),
        }
    }

    pub fn pull_counts(&self, n_arms: usize) -> Vec<u64> {
        let mut counts = vec![0u64; n_arms];
        for p in &self.pulls {
            counts[p.arm] += 1;
        }
        counts
    }

    /// Collected rewards, one sequence per arm in pull order.
    pub fn rewards_by_arm(&self, n_arms: usize) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new(); n_arms];
        for p in &self.pulls {
            out[p.arm].push(p.reward);
        }
        out
    }

    /// Every reward divided by the cumulative decline up to its step.
    pub fn rescaled_rewards(&self, decline_ratios: &[f64]) -> Result<Vec<f64>> {
        let cumulative = super::theory::cumulative_declines(decline_ratios)?;
        self.pulls
            .iter()
            .map(|p| {
                cumulative
                    .get((p.step - 1) as usize)
                    .map(|c| p.reward / c)
                    .ok_or_else(|| Error::invalid("decline_ratios", format!("do not reach step {}", p.step)))
            })
            .collect()
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

/// Plays `policy` on `env` for `horizon` steps.
pub fn run_policy<R: Rng + ?Sized>(env: &BanditEnv, policy: &Policy, horizon: u64, rng: &mut R) -> Result<PolicyTrace> {
    env.validate()?;
    let k = env.n_arms();
    if horizon < k as u64 {
        return Err(Error::invalid(
            "horizon",
            format!("{horizon} is shorter than the {k} initialization pulls"),
        ));
    }
    if let Some(max) = env.max_horizon() {
        if horizon > max {
            return Err(Error::invalid(
                "horizon",
                format!("{horizon} exceeds the {max} steps covered by the decline schedule"),
            ));
        }
    }

    let mut registry = match policy {
        Policy::CurriculumSoftmax { config } => {
            let mut config = config.clone();
            config.n_epoch = 1;
            Some(SamplerRegistry::new(k, config)?)
        }
        Policy::GreedyLoss { window_c } => {
            let mut config = CurriculumConfig::for_dataset(k);
            config.window_c = *window_c;
            config.alpha = 0.0;
            Some(SamplerRegistry::new(k, config)?)
        }
        Policy::Ucb1Greedy { alpha, .. } if !(alpha.is_finite() && *alpha >= 0.0) => {
            return Err(Error::invalid("alpha", "must be finite and >= 0"));
        }
        _ => None,
    };

    let scales = env.scales(horizon);
    let mut counts = vec![0u64; k];
    let mut sums = vec![0.0f64; k];
    let mut pulls = Vec::with_capacity(horizon as usize);
    let mut cumulative_regret = Vec::with_capacity(horizon as usize);
    let mut regret = 0.0;

    for step in 1..=horizon {
        let t = (step - 1) as usize;
        let arm = if t < k {
            t
        } else {
            match policy {
                Policy::Ucb1Greedy { alpha, bonus } => {
                    let total = t as u64;
                    argmax((0..k).map(|i| sums[i] / counts[i] as f64 + bonus.value(*alpha, counts[i], total)))
                }
                Policy::CurriculumSoftmax { .. } => {
                    let reg = registry.as_ref().expect("registry");
                    let probs = reg.epoch_distribution()?;
                    sample_epoch(&probs, 1, rng)?[0]
                }
                Policy::Uniform => rng.random_range(0..k),
                Policy::GreedyLoss { .. } => {
                    let reg = registry.as_ref().expect("registry");
                    argmax(reg.states().iter().map(|s| s.mean_loss().unwrap_or(f64::INFINITY)))
                }
            }
        };

        let scale = scales[t];
        let reward = env.pull_scaled(arm, step, scale, rng);
        counts[arm] += 1;
        sums[arm] += reward;
        if let Some(reg) = registry.as_mut() {
            reg.record_loss(arm, reward)?;
        }

        let (best, chosen) = env
            .expected_scaled(step, scale)
            .enumerate()
            .fold((f64::NEG_INFINITY, 0.0), |(best, chosen), (i, mu)| {
                (best.max(mu), if i == arm { mu } else { chosen })
            });
        regret += best - chosen;
        pulls.push(Pull { step, arm, reward });
        cumulative_regret.push(regret);
    }

    Ok(PolicyTrace {
        policy: policy.name().to_string(),
        pulls,
        cumulative_regret,
    })
}
