use rayon::prelude::*;
use serde::Serialize;

use curricula::bandit::{run_policy, theorem1_bound, BanditEnv, Drift, Policy};
use curricula::rng::seeded;
use curricula::stats::{mean, std_error};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::{seed_file, summary_file, write_csv, write_json, Check, RunOutcome};

#[derive(Debug, Clone, Serialize)]
pub struct RegretRow {
    pub seed: u64,
    pub policy: String,
    pub horizon: u64,
    pub regret: f64,
    pub bound: f64,
}

#[derive(Debug, Serialize)]
struct HorizonSummary {
    policy: String,
    horizon: u64,
    mean_regret: f64,
    std_error: f64,
    bound: f64,
    /// Only meaningful for stationary environments.
    bound_satisfied: Option<bool>,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    experiment: &'static str,
    seeds: &'a [u64],
    drift: &'a Drift,
    results: Vec<HorizonSummary>,
    /// Mean UCB1 regret with drift over the same arms without drift, at the
    /// largest horizon.
    drift_regret_ratio: Option<f64>,
    bound_satisfied: Option<bool>,
    checks: &'a [Check],
    passed: bool,
}

struct Cell {
    rows: Vec<RegretRow>,
    stationary_regret: Option<f64>,
}

fn run_cell(env: &BanditEnv, policy: &Policy, horizons: &[u64], seed: u64) -> Result<Cell> {
    let max = *horizons.iter().max().expect("validated");
    // Policies never look at the horizon, so the prefix of one long run is
    // exactly the run of the shorter horizon.
    let trace = run_policy(env, policy, max, &mut seeded(seed))?;
    let means = env.base_means();
    let rows = horizons
        .iter()
        .map(|&h| {
            Ok(RegretRow {
                seed,
                policy: policy.name().to_string(),
                horizon: h,
                regret: trace.regret_at(h as usize).expect("within trace"),
                bound: theorem1_bound(&means, h)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let stationary_regret = if env.drift != Drift::Stationary && matches!(policy, Policy::Ucb1Greedy { .. }) {
        let still = BanditEnv::stationary(env.arms.clone())?;
        Some(run_policy(&still, policy, max, &mut seeded(seed))?.regret())
    } else {
        None
    };
    Ok(Cell {
        rows,
        stationary_regret,
    })
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    let section = &config.bandit;
    let env = section.env()?;
    let policies = section.policies(&config.curriculum)?;
    let horizons = &section.horizons;
    let stationary = env.drift == Drift::Stationary;

    let cells: Vec<(u64, usize)> = config
        .seeds
        .iter()
        .flat_map(|&s| (0..policies.len()).map(move |p| (s, p)))
        .collect();
    let results: Vec<Cell> = cells
        .par_iter()
        .map(|&(seed, p)| run_cell(&env, &policies[p], horizons, seed))
        .collect::<Result<_>>()?;

    let dir = &config.out_dir;
    let mut outcome = RunOutcome::default();
    for &seed in &config.seeds {
        let rows: Vec<RegretRow> = cells
            .iter()
            .zip(&results)
            .filter(|((s, _), _)| *s == seed)
            .flat_map(|(_, c)| c.rows.iter().cloned())
            .collect();
        let path = seed_file(dir, "bandit", seed, "csv");
        write_csv(&path, &rows)?;
        outcome.files.push(path);
    }

    let mut summaries = Vec::new();
    for policy in &policies {
        for &h in horizons {
            let regrets: Vec<f64> = results
                .iter()
                .flat_map(|c| &c.rows)
                .filter(|r| r.policy == policy.name() && r.horizon == h)
                .map(|r| r.regret)
                .collect();
            let bound = theorem1_bound(&env.base_means(), h)?;
            let m = mean(&regrets);
            summaries.push(HorizonSummary {
                policy: policy.name().to_string(),
                horizon: h,
                mean_regret: m,
                std_error: std_error(&regrets),
                bound,
                bound_satisfied: stationary.then_some(m <= bound),
            });
        }
    }

    let ucb1: Vec<&HorizonSummary> = summaries.iter().filter(|s| s.policy == "ucb1_greedy").collect();
    let bound_satisfied =
        (stationary && !ucb1.is_empty()).then(|| ucb1.iter().all(|s| s.bound_satisfied == Some(true)));
    if let Some(ok) = bound_satisfied {
        let detail = ucb1
            .iter()
            .map(|s| {
                format!(
                    "n={}: mean regret {:.2}, bound {:.2}",
                    s.horizon, s.mean_regret, s.bound
                )
            })
            .collect::<Vec<_>>()
            .join(", ");
        outcome.checks.push(Check::new("ucb1_regret_bound", ok, detail));
    }

    let drift_regret_ratio = {
        let max = *horizons.iter().max().expect("validated");
        let pairs: Vec<(f64, f64)> = results
            .iter()
            .filter_map(|c| {
                let drifting = c.rows.iter().find(|r| r.horizon == max)?.regret;
                Some((drifting, c.stationary_regret?))
            })
            .collect();
        (!pairs.is_empty()).then(|| {
            let d: f64 = pairs.iter().map(|p| p.0).sum();
            let s: f64 = pairs.iter().map(|p| p.1).sum();
            d / s
        })
    };
    if let Some(ratio) = drift_regret_ratio {
        outcome.checks.push(Check::new(
            "drift_regret_ratio",
            ratio > section.min_drift_regret_ratio,
            format!(
                "drifting/stationary regret {ratio:.2}, need > {}",
                section.min_drift_regret_ratio
            ),
        ));
    }

    let passed = outcome.checks.iter().all(|c| c.passed);
    let summary = Summary {
        experiment: "bandit",
        seeds: &config.seeds,
        drift: &env.drift,
        results: summaries,
        drift_regret_ratio,
        bound_satisfied,
        checks: &outcome.checks,
        passed,
    };
    let path = summary_file(dir, "bandit");
    write_json(&path, &summary)?;
    outcome.files.push(path);
    Ok(outcome)
}
