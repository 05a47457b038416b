use rand_distr::{Beta, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use curricula::anchors::{assemble_training_anchors, select_negatives, AnchorBatch, SelectionRecord};
use curricula::rng::{seeded, seeded_stream};
use curricula::stats::{mean, std_error};

use crate::config::{ExperimentConfig, StepClock};
use crate::error::Result;
use crate::output::{seed_file, summary_file, write_csv, write_json, Check, RunOutcome};

#[derive(Debug, Serialize)]
struct StepSummary {
    step: u64,
    xi: f64,
    eta: f64,
    mean_confidence: f64,
    std_error: f64,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    experiment: &'static str,
    seeds: &'a [u64],
    clock: StepClock,
    steps: Vec<StepSummary>,
    checks: &'a [Check],
    passed: bool,
}

/// Runs the schedule over one fixed population of negatives per seed.
fn simulate(config: &ExperimentConfig, seed: u64) -> Result<Vec<SelectionRecord>> {
    let section = &config.anchors;
    let schedule = section.schedule()?;
    let beta = Beta::new(section.confidence.a, section.confidence.b).expect("validated shapes");
    let mut pop_rng = seeded_stream(seed, 1);
    let confidences: Vec<f64> = (0..section.n_negatives).map(|_| beta.sample(&mut pop_rng)).collect();
    let batch = AnchorBatch::from_confidences(section.n_positives, confidences)?;

    let per_step = match section.clock {
        StepClock::Epoch => section.batches_per_epoch,
        StepClock::Iteration => 1,
    };
    let mut rng = seeded(seed);
    let mut records = Vec::new();
    for step in 0..=schedule.total_steps {
        let (xi, eta) = schedule.thresholds_at(step)?;
        for _ in 0..per_step {
            let selected = select_negatives(&batch, xi, eta, section.max_ratio, &mut rng)?;
            let anchors = assemble_training_anchors(&batch, &selected)?;
            debug_assert_eq!(anchors.positives.len(), section.n_positives);
            records.push(SelectionRecord::new(step, xi, eta, &batch, &selected));
        }
    }
    Ok(records)
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    let section = &config.anchors;
    let schedule = section.schedule()?;
    let results: Vec<Vec<SelectionRecord>> = config
        .seeds
        .par_iter()
        .map(|&seed| simulate(config, seed))
        .collect::<Result<_>>()?;

    let mut outcome = RunOutcome::default();
    for (&seed, records) in config.seeds.iter().zip(&results) {
        let path = seed_file(&config.out_dir, "anchors", seed, "csv");
        write_csv(&path, records)?;
        outcome.files.push(path);
    }

    let mut steps = Vec::new();
    for step in 0..=schedule.total_steps {
        let (xi, eta) = schedule.thresholds_at(step)?;
        let values: Vec<f64> = results
            .iter()
            .flatten()
            .filter(|r| r.step == step && !r.mean_confidence.is_nan())
            .map(|r| r.mean_confidence)
            .collect();
        steps.push(StepSummary {
            step,
            xi,
            eta,
            mean_confidence: if values.is_empty() { f64::NAN } else { mean(&values) },
            std_error: std_error(&values),
        });
    }

    let start = schedule.thresholds_at(0)?;
    let end = schedule.thresholds_at(schedule.total_steps)?;
    let endpoints = start == (schedule.xi_start, schedule.eta_start) && end == (0.0, schedule.eta_end);
    outcome.checks.push(Check::new(
        "schedule_endpoints",
        endpoints,
        format!("start {start:?}, end {end:?}"),
    ));

    if schedule.total_steps % 2 == 0 {
        let (xi, eta) = schedule.thresholds_at(schedule.total_steps / 2)?;
        let (mxi, meta) = (0.5 * schedule.xi_start, 0.5 * (schedule.eta_start + schedule.eta_end));
        let ok = (xi - mxi).abs() <= 1e-12 && (eta - meta).abs() <= 1e-12;
        outcome
            .checks
            .push(Check::new("schedule_midpoint", ok, format!("({xi}, {eta})")));
    }

    // Nonincreasing up to three combined standard errors of sampling noise.
    let mut worst = f64::NEG_INFINITY;
    for w in steps.windows(2) {
        let slack = 3.0 * (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
        worst = worst.max(w[1].mean_confidence - w[0].mean_confidence - slack);
    }
    outcome.checks.push(Check::new(
        "selection_hardens",
        worst <= 1e-12,
        format!("largest unexplained rise {worst:.3e}"),
    ));

    let passed = outcome.checks.iter().all(|c| c.passed);
    let summary = Summary {
        experiment: "anchors",
        seeds: &config.seeds,
        clock: section.clock,
        steps,
        checks: &outcome.checks,
        passed,
    };
    let path = summary_file(&config.out_dir, "anchors");
    write_json(&path, &summary)?;
    outcome.files.push(path);
    Ok(outcome)
}
