//! Experiment configuration files (TOML).
//!
//! One file describes one experiment. Sections that the experiment does not
//! use are ignored; missing sections take their defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use curricula::anchors::AnchorSchedule;
use curricula::bandit::{ArmDistribution, BanditEnv, Drift, Policy};
use curricula::learner::{Strategy, TaskSpec};
use curricula::sampler::{CurriculumConfig, ExplorationBonus};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Bandit,
    Curriculum,
    Anchors,
    Lemma1,
    Checkpoint,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Bandit => "bandit",
            ExperimentKind::Curriculum => "curriculum",
            ExperimentKind::Anchors => "anchors",
            ExperimentKind::Lemma1 => "lemma1",
            ExperimentKind::Checkpoint => "checkpoint",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the subcommand when present.
    #[serde(default)]
    pub kind: Option<ExperimentKind>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub curriculum: CurriculumSection,
    #[serde(default)]
    pub anchors: AnchorSection,
    #[serde(default)]
    pub bandit: BanditSection,
    #[serde(default)]
    pub task: TaskSection,
    #[serde(default)]
    pub lemma1: Lemma1Section,
    #[serde(default)]
    pub checkpoint: CheckpointSection,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("results")
}

/// Sampler hyperparameters; `n_epoch` defaults to a tenth of the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurriculumSection {
    pub alpha: f64,
    pub epsilon: f64,
    pub window_c: usize,
    pub n_epoch: Option<usize>,
    pub batch_size: usize,
    pub bonus: ExplorationBonus,
}

impl Default for CurriculumSection {
    fn default() -> Self {
        CurriculumSection {
            alpha: CurriculumConfig::DEFAULT_ALPHA,
            epsilon: CurriculumConfig::DEFAULT_EPSILON,
            window_c: CurriculumConfig::DEFAULT_WINDOW,
            n_epoch: None,
            batch_size: CurriculumConfig::DEFAULT_BATCH_SIZE,
            bonus: ExplorationBonus::default(),
        }
    }
}

impl CurriculumSection {
    pub fn resolve(&self, n_samples: usize) -> Result<CurriculumConfig> {
        let config = CurriculumConfig {
            alpha: self.alpha,
            epsilon: self.epsilon,
            window_c: self.window_c,
            n_epoch: self
                .n_epoch
                .unwrap_or_else(|| CurriculumConfig::default_n_epoch(n_samples)),
            batch_size: self.batch_size,
            bonus: self.bonus,
        };
        config.validate().map_err(|e| prefixed("curriculum", e))?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepClock {
    /// One schedule step per epoch; every batch of the epoch shares it.
    #[default]
    Epoch,
    /// One schedule step per batch.
    Iteration,
}

/// Confidence population of the synthetic negatives: `Beta(a, b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfidencePopulation {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnchorSection {
    pub xi_start: f64,
    pub eta_start: f64,
    pub eta_end: f64,
    pub total_steps: u64,
    /// Omit for uncapped selection.
    pub max_ratio: Option<f64>,
    pub clock: StepClock,
    pub n_positives: usize,
    pub n_negatives: usize,
    /// Batches per epoch under the epoch clock.
    pub batches_per_epoch: usize,
    pub confidence: ConfidencePopulation,
}

impl Default for AnchorSection {
    fn default() -> Self {
        AnchorSection {
            xi_start: AnchorSchedule::DEFAULT_XI_START,
            eta_start: AnchorSchedule::DEFAULT_ETA_START,
            eta_end: AnchorSchedule::DEFAULT_ETA_END,
            total_steps: 100,
            max_ratio: Some(3.0),
            clock: StepClock::Epoch,
            n_positives: 4,
            n_negatives: 2000,
            batches_per_epoch: 8,
            confidence: ConfidencePopulation { a: 2.0, b: 2.0 },
        }
    }
}

impl AnchorSection {
    pub fn schedule(&self) -> Result<AnchorSchedule> {
        let s = AnchorSchedule {
            xi_start: self.xi_start,
            eta_start: self.eta_start,
            eta_end: self.eta_end,
            total_steps: self.total_steps,
        };
        s.validate().map_err(|e| prefixed("anchors", e))?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        self.schedule()?;
        if let Some(r) = self.max_ratio {
            if !(r.is_finite() && r > 0.0) {
                return Err(field_error("anchors.max_ratio", "must be positive"));
            }
        }
        if self.batches_per_epoch == 0 {
            return Err(field_error("anchors.batches_per_epoch", "must be at least 1"));
        }
        let ConfidencePopulation { a, b } = self.confidence;
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(field_error("anchors.confidence", "beta shapes must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BanditSection {
    pub arms: Vec<ArmDistribution>,
    pub drift: Drift,
    pub policies: Vec<String>,
    pub horizons: Vec<u64>,
    /// Minimum ratio of drifting to stationary UCB1 regret at the largest
    /// horizon; only checked for drifting environments.
    pub min_drift_regret_ratio: f64,
}

impl Default for BanditSection {
    fn default() -> Self {
        BanditSection {
            arms: vec![
                ArmDistribution::Bernoulli { mean: 0.9 },
                ArmDistribution::Bernoulli { mean: 0.6 },
            ],
            drift: Drift::Stationary,
            policies: vec!["ucb1_greedy".into()],
            horizons: vec![1_000, 10_000, 100_000],
            min_drift_regret_ratio: 5.0,
        }
    }
}

impl BanditSection {
    pub fn env(&self) -> Result<BanditEnv> {
        BanditEnv::new(self.arms.clone(), self.drift.clone()).map_err(|e| prefixed("bandit", e))
    }

    /// Named policies; `curriculum_softmax` takes its hyperparameters from
    /// the `[curriculum]` section.
    pub fn policies(&self, curriculum: &CurriculumSection) -> Result<Vec<Policy>> {
        self.policies
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let policy = Policy::from_name(name)
                    .map_err(|_| field_error(format!("bandit.policies[{i}]"), format!("unknown policy {name:?}")))?;
                Ok(match policy {
                    Policy::CurriculumSoftmax { .. } => Policy::CurriculumSoftmax {
                        config: CurriculumConfig {
                            n_epoch: 1,
                            batch_size: 1,
                            ..curriculum.resolve(1)?
                        },
                    },
                    other => other,
                })
            })
            .collect()
    }

    fn validate(&self, curriculum: &CurriculumSection) -> Result<()> {
        let env = self.env()?;
        self.policies(curriculum)?;
        if self.policies.is_empty() {
            return Err(field_error("bandit.policies", "must not be empty"));
        }
        if self.horizons.is_empty() {
            return Err(field_error("bandit.horizons", "must not be empty"));
        }
        for (i, &h) in self.horizons.iter().enumerate() {
            if h < env.n_arms() as u64 {
                return Err(field_error(
                    format!("bandit.horizons[{i}]"),
                    "shorter than one pull per arm",
                ));
            }
            if env.max_horizon().is_some_and(|m| h > m) {
                return Err(field_error(
                    format!("bandit.horizons[{i}]"),
                    "exceeds the decline schedule",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskSection {
    pub n_samples: usize,
    pub initial_loss: [f64; 2],
    pub decay_rate: [f64; 2],
    pub noise_sigma: f64,
    pub forgetting_rate: f64,
    pub max_epochs: u64,
    pub target: f64,
    pub strategies: Vec<Strategy>,
    /// Pass threshold for median time-to-target, curriculum over uniform.
    pub max_speedup_ratio: f64,
    /// Seeds in which curriculum must end with a lower max loss than greedy.
    pub min_forgetting_wins: usize,
}

impl Default for TaskSection {
    fn default() -> Self {
        let spec = TaskSpec::reference();
        TaskSection {
            n_samples: spec.n_samples,
            initial_loss: spec.initial_loss,
            decay_rate: spec.decay_rate,
            noise_sigma: spec.noise_sigma,
            forgetting_rate: spec.forgetting_rate,
            max_epochs: 4000,
            target: 0.05,
            strategies: vec![Strategy::Curriculum, Strategy::Uniform],
            max_speedup_ratio: 0.75,
            min_forgetting_wins: 8,
        }
    }
}

impl TaskSection {
    pub fn spec(&self) -> Result<TaskSpec> {
        let spec = TaskSpec {
            n_samples: self.n_samples,
            initial_loss: self.initial_loss,
            decay_rate: self.decay_rate,
            noise_sigma: self.noise_sigma,
            forgetting_rate: self.forgetting_rate,
        };
        spec.validate().map_err(|e| prefixed("task", e))?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        self.spec()?;
        if self.max_epochs == 0 {
            return Err(field_error("task.max_epochs", "must be at least 1"));
        }
        if !(self.target.is_finite() && self.target > 0.0) {
            return Err(field_error("task.target", "must be positive"));
        }
        if self.strategies.is_empty() {
            return Err(field_error("task.strategies", "must not be empty"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Lemma1Section {
    /// Constant per-step decline ratio.
    pub decline: f64,
    pub horizon: u64,
    /// Total rewards drawn, split into `draws / horizon` sequences.
    pub draws: u64,
    /// Steps `1..=stratum` form the early stratum, the last `stratum` steps the late one.
    pub stratum: u64,
    pub significance: f64,
}

impl Default for Lemma1Section {
    fn default() -> Self {
        Lemma1Section {
            decline: 0.95,
            horizon: 100,
            draws: 10_000,
            stratum: 10,
            significance: 0.01,
        }
    }
}

impl Lemma1Section {
    fn validate(&self) -> Result<()> {
        if !(self.decline > 0.0 && self.decline.is_finite()) {
            return Err(field_error("lemma1.decline", "must be positive"));
        }
        if self.horizon < 2 {
            return Err(field_error("lemma1.horizon", "must be at least 2"));
        }
        if self.draws < self.horizon {
            return Err(field_error("lemma1.draws", "must cover at least one sequence"));
        }
        if self.stratum == 0 || 2 * self.stratum > self.horizon {
            return Err(field_error("lemma1.stratum", "must be in 1..=horizon/2"));
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(field_error("lemma1.significance", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckpointSection {
    /// Epochs of the curriculum simulated against `[task]` before dumping.
    pub epochs: u64,
}

impl Default for CheckpointSection {
    fn default() -> Self {
        CheckpointSection { epochs: 5 }
    }
}

fn field_error(field: impl AsRef<str>, reason: impl AsRef<str>) -> CliError {
    CliError::Config(format!("{}: {}", field.as_ref(), reason.as_ref()))
}

fn prefixed(section: &str, e: curricula::Error) -> CliError {
    match e {
        curricula::Error::Invalid { field, reason } => field_error(format!("{section}.{field}"), reason),
        other => CliError::Config(format!("{section}: {other}")),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| CliError::Config(e.to_string()))?;
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("{path}: {}", e.into_inner().message().trim()))
        })?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    /// Checks the sections `kind` uses.
    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        if let Some(k) = self.kind {
            if k != kind {
                return Err(field_error(
                    "kind",
                    format!("config is for `{}`, not `{}`", k.name(), kind.name()),
                ));
            }
        }
        if self.seeds.is_empty() {
            return Err(field_error("seeds", "must not be empty"));
        }
        self.curriculum.resolve(self.task.n_samples.max(1))?;
        match kind {
            ExperimentKind::Bandit => self.bandit.validate(&self.curriculum),
            ExperimentKind::Curriculum => {
                self.task.validate()?;
                self.curriculum.resolve(self.task.n_samples).map(drop)
            }
            ExperimentKind::Anchors => self.anchors.validate(),
            ExperimentKind::Lemma1 => self.lemma1.validate(),
            ExperimentKind::Checkpoint => {
                self.task.spec()?;
                self.curriculum.resolve(self.task.n_samples).map(drop)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = ExperimentConfig::parse("seeds = [1, 2]").unwrap();
        assert_eq!(c.seeds, vec![1, 2]);
        assert_eq!(c.out_dir, PathBuf::from("results"));
        for kind in [
            ExperimentKind::Bandit,
            ExperimentKind::Curriculum,
            ExperimentKind::Anchors,
            ExperimentKind::Lemma1,
            ExperimentKind::Checkpoint,
        ] {
            c.validate(kind).unwrap();
        }
        assert_eq!(c.curriculum.resolve(1000).unwrap().n_epoch, 100);
    }

    #[test]
    fn epsilon_out_of_range_names_the_field() {
        let c = ExperimentConfig::parse("seeds = [1]\n[curriculum]\nepsilon = 1.5\n").unwrap();
        let err = c.validate(ExperimentKind::Curriculum).unwrap_err().to_string();
        assert!(err.contains("curriculum.epsilon"), "{err}");
    }

    #[test]
    fn type_errors_carry_the_path() {
        let err = ExperimentConfig::parse("seeds = [1]\n[task]\nn_samples = \"many\"\n").unwrap_err();
        assert!(err.to_string().contains("task.n_samples"), "{err}");
        let err = ExperimentConfig::parse("seeds = [1]\n[bandit]\nhorizon = 5\n").unwrap_err();
        assert!(err.to_string().contains("bandit"), "{err}");
    }

    #[test]
    fn kind_must_match() {
        let c = ExperimentConfig::parse("kind = \"bandit\"\nseeds = [1]").unwrap();
        assert!(c.validate(ExperimentKind::Lemma1).is_err());
        assert!(ExperimentConfig::parse("seeds = []")
            .unwrap()
            .validate(ExperimentKind::Bandit)
            .is_err());
    }

    #[test]
    fn arms_and_drift_parse() {
        let c = ExperimentConfig::parse(
            r#"
seeds = [0]
[bandit]
arms = [{ kind = "bernoulli", mean = 0.9 }, { kind = "beta", a = 2.0, b = 2.0, scale = 1.0 }]
drift = { kind = "rotating", period = 100 }
policies = ["ucb1_greedy", "uniform"]
horizons = [500]
"#,
        )
        .unwrap();
        c.validate(ExperimentKind::Bandit).unwrap();
        assert_eq!(c.bandit.drift, Drift::Rotating { period: 100 });
        let bad = c.bandit.policies.clone();
        let mut c2 = c.clone();
        c2.bandit.policies = vec!["exp3".into()];
        let err = c2.validate(ExperimentKind::Bandit).unwrap_err().to_string();
        assert!(err.contains("bandit.policies[0]"), "{err} {bad:?}");
    }
}
