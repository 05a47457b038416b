use std::path::Path;

use rand::Rng;

use curricula::rng::{seeded, seeded_stream};
use curricula::sampler::{format_log, parse_log, Operation, SamplerRegistry};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::output::{write_text, RunOutcome};

const NOISE_STREAM: u64 = 2;

fn initial_registry(config: &ExperimentConfig, resume: Option<&Path>) -> Result<SamplerRegistry> {
    match resume {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            Ok(SamplerRegistry::from_json(&text)?)
        }
        None => {
            let n = config.task.n_samples;
            Ok(SamplerRegistry::new(n, config.curriculum.resolve(n)?)?)
        }
    }
}

/// Runs `epochs` curriculum epochs against the configured task, logging
/// every registry mutation.
pub fn simulate(
    config: &ExperimentConfig,
    seed: u64,
    mut registry: SamplerRegistry,
) -> Result<(SamplerRegistry, Vec<Operation>)> {
    let mut task = config
        .task
        .spec()?
        .generate(&mut seeded_stream(seed, super::curriculum::TASK_STREAM))?;
    if task.n_samples() != registry.len() {
        return Err(CliError::Config(format!(
            "task.n_samples: {} does not match the checkpoint's {} samples",
            task.n_samples(),
            registry.len()
        )));
    }
    let mut epoch_seeds = seeded(seed);
    let mut noise = seeded_stream(seed, NOISE_STREAM);
    let mut ops = Vec::new();
    for _ in 0..config.checkpoint.epochs {
        let op = Operation::NextEpoch {
            seed: epoch_seeds.random(),
        };
        let batches = registry.apply(&op)?.expect("next_epoch yields batches");
        ops.push(op);
        for batch in batches {
            let pairs = batch
                .iter()
                .map(|&id| Ok((id, task.observe_loss(id, &mut noise)?)))
                .collect::<Result<Vec<_>>>()?;
            let op = Operation::ReportLosses { pairs };
            registry.apply(&op)?;
            ops.push(op);
        }
        task.end_epoch();
    }
    Ok((registry, ops))
}

pub fn run(config: &ExperimentConfig, resume: Option<&Path>, replay: Option<&Path>) -> Result<RunOutcome> {
    let dir = &config.out_dir;
    let mut outcome = RunOutcome::default();
    if let Some(log) = replay {
        let text = std::fs::read_to_string(log).map_err(|e| CliError::io(log, e))?;
        let ops = parse_log(&text)?;
        let mut registry = initial_registry(config, resume)?;
        registry.replay(&ops)?;
        let path = dir.join("checkpoint-replay.json");
        write_text(&path, &(registry.to_json() + "\n"))?;
        outcome.files.push(path);
        return Ok(outcome);
    }

    for &seed in &config.seeds {
        let (registry, ops) = simulate(config, seed, initial_registry(config, resume)?)?;
        let path = dir.join(format!("checkpoint-{seed}.json"));
        write_text(&path, &(registry.to_json() + "\n"))?;
        outcome.files.push(path);
        let path = dir.join(format!("checkpoint-{seed}-ops.jsonl"));
        write_text(&path, &format_log(&ops))?;
        outcome.files.push(path);
    }
    Ok(outcome)
}
