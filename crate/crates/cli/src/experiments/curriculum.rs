use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use curricula::learner::{run_experiment, time_to_target, Strategy};
use curricula::rng::{seeded, seeded_stream};
use curricula::stats::median;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::{seed_file, summary_file, write_csv, write_json, Check, RunOutcome};

/// Stream of a seed used to draw the task; sampling uses stream 0.
pub const TASK_STREAM: u64 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct EpochRow {
    pub epoch: u64,
    pub strategy: Strategy,
    pub seed: u64,
    pub mean_true_loss: f64,
    pub max_true_loss: f64,
    pub max_staleness: u64,
}

struct Cell {
    rows: Vec<EpochRow>,
    time_to_target: Option<u64>,
    final_max_true_loss: f64,
    peak_staleness: u64,
}

#[derive(Debug, Serialize)]
struct StrategySummary {
    /// Per seed; `null` when the target was not reached.
    time_to_target: Vec<Option<u64>>,
    /// Unreached seeds count as never finishing.
    median_time_to_target: Option<f64>,
    final_max_true_loss: Vec<f64>,
    peak_staleness: Vec<u64>,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    experiment: &'static str,
    seeds: &'a [u64],
    target: f64,
    max_epochs: u64,
    strategies: BTreeMap<&'static str, StrategySummary>,
    speedup_ratio: Option<f64>,
    forgetting_wins: Option<usize>,
    staleness_limit: f64,
    curriculum_staleness_within_limit: Option<bool>,
    checks: &'a [Check],
    passed: bool,
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    let section = &config.task;
    let spec = section.spec()?;
    let sampler = config.curriculum.resolve(spec.n_samples)?;
    let strategies = &section.strategies;

    let cells: Vec<(u64, Strategy)> = config
        .seeds
        .iter()
        .flat_map(|&s| strategies.iter().map(move |&st| (s, st)))
        .collect();
    let results: Vec<Cell> = cells
        .par_iter()
        .map(|&(seed, strategy)| {
            let task = spec.generate(&mut seeded_stream(seed, TASK_STREAM))?;
            let reports = run_experiment(&task, strategy, section.max_epochs, &sampler, &mut seeded(seed))?;
            let last = reports.last().expect("max_epochs >= 1");
            Ok(Cell {
                time_to_target: time_to_target(&reports, section.target)?,
                final_max_true_loss: last.max_true_loss,
                peak_staleness: reports.iter().map(|r| r.max_staleness).max().unwrap_or(0),
                rows: reports
                    .iter()
                    .map(|r| EpochRow {
                        epoch: r.epoch,
                        strategy,
                        seed,
                        mean_true_loss: r.mean_true_loss,
                        max_true_loss: r.max_true_loss,
                        max_staleness: r.max_staleness,
                    })
                    .collect(),
            })
        })
        .collect::<Result<_>>()?;

    let mut outcome = RunOutcome::default();
    for &seed in &config.seeds {
        let rows: Vec<&EpochRow> = cells
            .iter()
            .zip(&results)
            .filter(|((s, _), _)| *s == seed)
            .flat_map(|(_, c)| &c.rows)
            .collect();
        let path = seed_file(&config.out_dir, "curriculum", seed, "csv");
        write_csv(&path, &rows)?;
        outcome.files.push(path);
    }

    let of = |strategy: Strategy| -> Vec<&Cell> {
        cells
            .iter()
            .zip(&results)
            .filter(|((_, st), _)| *st == strategy)
            .map(|(_, c)| c)
            .collect()
    };
    let median_time = |cs: &[&Cell]| {
        let times: Vec<f64> = cs
            .iter()
            .map(|c| c.time_to_target.map_or(f64::INFINITY, |t| t as f64))
            .collect();
        median(&times).filter(|m| m.is_finite())
    };

    let mut summaries = BTreeMap::new();
    for &strategy in strategies {
        let cs = of(strategy);
        summaries.insert(
            strategy.name(),
            StrategySummary {
                time_to_target: cs.iter().map(|c| c.time_to_target).collect(),
                median_time_to_target: median_time(&cs),
                final_max_true_loss: cs.iter().map(|c| c.final_max_true_loss).collect(),
                peak_staleness: cs.iter().map(|c| c.peak_staleness).collect(),
            },
        );
    }

    let has = |s: Strategy| strategies.contains(&s);
    let curriculum = of(Strategy::Curriculum);

    let mut speedup_ratio = None;
    if has(Strategy::Curriculum) && has(Strategy::Uniform) {
        let ratio = match (median_time(&curriculum), median_time(&of(Strategy::Uniform))) {
            (Some(c), Some(u)) if u > 0.0 => Some(c / u),
            _ => None,
        };
        speedup_ratio = ratio;
        outcome.checks.push(Check::new(
            "speedup_ratio",
            ratio.is_some_and(|r| r <= section.max_speedup_ratio),
            match ratio {
                Some(r) => format!(
                    "median curriculum/uniform {r:.4}, need <= {}",
                    section.max_speedup_ratio
                ),
                None => "target not reached by a median seed".to_string(),
            },
        ));
    }

    let mut forgetting_wins = None;
    if has(Strategy::Curriculum) && has(Strategy::GreedyHardMining) && section.forgetting_rate > 0.0 {
        let greedy = of(Strategy::GreedyHardMining);
        let wins = curriculum
            .iter()
            .zip(&greedy)
            .filter(|(c, g)| c.final_max_true_loss < g.final_max_true_loss)
            .count();
        forgetting_wins = Some(wins);
        outcome.checks.push(Check::new(
            "forgetting_resistance",
            wins >= section.min_forgetting_wins,
            format!(
                "{wins}/{} seeds, need {}",
                curriculum.len(),
                section.min_forgetting_wins
            ),
        ));
    }

    // Informational: not part of the --check gate.
    let staleness_limit = spec.n_samples as f64 / sampler.n_epoch as f64 * 10.0;
    let curriculum_staleness_within_limit =
        has(Strategy::Curriculum).then(|| curriculum.iter().all(|c| (c.peak_staleness as f64) < staleness_limit));

    let passed = outcome.checks.iter().all(|c| c.passed);
    let summary = Summary {
        experiment: "curriculum",
        seeds: &config.seeds,
        target: section.target,
        max_epochs: section.max_epochs,
        strategies: summaries,
        speedup_ratio,
        forgetting_wins,
        staleness_limit,
        curriculum_staleness_within_limit,
        checks: &outcome.checks,
        passed,
    };
    let path = summary_file(&config.out_dir, "curriculum");
    write_json(&path, &summary)?;
    outcome.files.push(path);
    Ok(outcome)
}
