use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use curricula_cli::config::{ExperimentConfig, ExperimentKind};
use curricula_cli::error::CliError;
use curricula_cli::output::RunOutcome;
use curricula_cli::Overrides;

#[derive(Parser)]
#[command(name = "curricula", version, about = "Curriculum sampling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Run a single seed instead of the config's seed list.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding `out_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Experiment {
    #[command(flatten)]
    common: Common,
    /// Exit with status 2 if any acceptance flag fails.
    #[arg(long)]
    check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// UCB1 and curriculum policies on multi-armed bandits.
    Bandit(Experiment),
    /// Curriculum vs baselines on the synthetic training task.
    Curriculum(Experiment),
    /// Negative-anchor confidence schedule.
    Anchors(Experiment),
    /// Reward rescaling under multiplicative decline.
    Lemma1(Experiment),
    /// Dump a sampler registry after simulated epochs, or replay an operation log.
    Checkpoint {
        #[command(flatten)]
        common: Common,
        /// Start from this registry checkpoint instead of a fresh one.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Replay this JSON-lines operation log instead of simulating.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
}

fn overrides(common: &Common) -> Overrides {
    Overrides {
        seed: common.seed,
        out_dir: common.out.clone(),
    }
}

fn report(outcome: &RunOutcome) {
    for check in &outcome.checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status} {}: {}", check.name, check.detail);
    }
    for file in &outcome.files {
        println!("wrote {}", file.display());
    }
}

fn execute(cli: Cli) -> Result<RunOutcome, CliError> {
    let (kind, exp) = match cli.command {
        Command::Checkpoint { common, resume, replay } => {
            let config = ExperimentConfig::load(&common.config)?;
            return curricula_cli::run_checkpoint(config, &overrides(&common), resume.as_deref(), replay.as_deref());
        }
        Command::Bandit(e) => (ExperimentKind::Bandit, e),
        Command::Curriculum(e) => (ExperimentKind::Curriculum, e),
        Command::Anchors(e) => (ExperimentKind::Anchors, e),
        Command::Lemma1(e) => (ExperimentKind::Lemma1, e),
    };
    let config = ExperimentConfig::load(&exp.common.config)?;
    curricula_cli::run(kind, config, &overrides(&exp.common), exp.check)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(outcome) => {
            report(&outcome);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
