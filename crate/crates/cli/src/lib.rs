//! Experiment runner behind the `curricula` binary.
//!
//! Each subcommand reads one TOML config, fans the (seed x policy) cells out
//! over a rayon pool, and writes `<experiment>-<seed>.csv` files plus an
//! `<experiment>-summary.json` from a single collector.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};

use config::{ExperimentConfig, ExperimentKind};
use error::{CliError, Result};
use output::RunOutcome;

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(seed) = self.seed {
            config.seeds = vec![seed];
        }
        if let Some(dir) = &self.out_dir {
            config.out_dir = dir.clone();
        }
    }
}

/// Runs one experiment. With `check`, failing acceptance flags become an
/// error after all files are written.
pub fn run(
    kind: ExperimentKind,
    mut config: ExperimentConfig,
    overrides: &Overrides,
    check: bool,
) -> Result<RunOutcome> {
    overrides.apply(&mut config);
    config.validate(kind)?;
    output::ensure_dir(&config.out_dir)?;
    let outcome = match kind {
        ExperimentKind::Bandit => experiments::bandit::run(&config)?,
        ExperimentKind::Curriculum => experiments::curriculum::run(&config)?,
        ExperimentKind::Anchors => experiments::anchors::run(&config)?,
        ExperimentKind::Lemma1 => experiments::lemma1::run(&config)?,
        ExperimentKind::Checkpoint => experiments::checkpoint::run(&config, None, None)?,
    };
    finish(outcome, check)
}

/// The `checkpoint` subcommand: optionally resume from a registry file and
/// replay an operation log instead of simulating.
pub fn run_checkpoint(
    mut config: ExperimentConfig,
    overrides: &Overrides,
    resume: Option<&Path>,
    replay: Option<&Path>,
) -> Result<RunOutcome> {
    overrides.apply(&mut config);
    config.validate(ExperimentKind::Checkpoint)?;
    output::ensure_dir(&config.out_dir)?;
    experiments::checkpoint::run(&config, resume, replay)
}

fn finish(outcome: RunOutcome, check: bool) -> Result<RunOutcome> {
    let failures = outcome.failures();
    if check && !failures.is_empty() {
        return Err(CliError::Acceptance(failures));
    }
    Ok(outcome)
}
