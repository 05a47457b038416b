use rayon::prelude::*;
use serde::Serialize;

use curricula::bandit::{run_policy, ArmDistribution, BanditEnv, Drift, Policy};
use curricula::rng::seeded;
use curricula::stats::{ks_two_sample, KsResult};

use crate::config::{ExperimentConfig, Lemma1Section};
use crate::error::Result;
use crate::output::{seed_file, summary_file, write_csv, write_json, Check, RunOutcome};

#[derive(Debug, Clone, Serialize)]
pub struct KsRow {
    pub seed: u64,
    pub series: &'static str,
    pub n_early: usize,
    pub n_late: usize,
    pub ks_statistic: f64,
    pub p_value: f64,
}

/// Early/late KS comparison of raw and rescaled rewards for one seed.
pub struct Lemma1Result {
    pub raw: KsResult,
    pub rescaled: KsResult,
    pub n_early: usize,
    pub n_late: usize,
}

/// Draws `draws / horizon` sequences of `X * decline^(t-1)` with
/// `X ~ Uniform[0, 1]`, rescales them, and compares the first and last
/// `stratum` steps.
pub fn simulate(section: &Lemma1Section, seed: u64) -> Result<Lemma1Result> {
    let ratios = vec![section.decline; (section.horizon - 1) as usize];
    let env = BanditEnv::new(
        vec![ArmDistribution::Beta {
            a: 1.0,
            b: 1.0,
            scale: 1.0,
        }],
        Drift::Decline { ratios: ratios.clone() },
    )?;
    let mut rng = seeded(seed);
    let sequences = section.draws / section.horizon;
    let late_start = section.horizon - section.stratum + 1;
    let (mut raw_early, mut raw_late) = (Vec::new(), Vec::new());
    let (mut res_early, mut res_late) = (Vec::new(), Vec::new());
    for _ in 0..sequences {
        let trace = run_policy(&env, &Policy::Uniform, section.horizon, &mut rng)?;
        let rescaled = trace.rescaled_rewards(&ratios)?;
        for (pull, r) in trace.pulls.iter().zip(rescaled) {
            if pull.step <= section.stratum {
                raw_early.push(pull.reward);
                res_early.push(r);
            } else if pull.step >= late_start {
                raw_late.push(pull.reward);
                res_late.push(r);
            }
        }
    }
    Ok(Lemma1Result {
        raw: ks_two_sample(&raw_early, &raw_late)?,
        rescaled: ks_two_sample(&res_early, &res_late)?,
        n_early: raw_early.len(),
        n_late: raw_late.len(),
    })
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    experiment: &'static str,
    section: &'a Lemma1Section,
    rows: Vec<KsRow>,
    rescaled_stationary: bool,
    raw_nonstationary: bool,
    checks: &'a [Check],
    passed: bool,
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    let section = &config.lemma1;
    let results: Vec<Lemma1Result> = config
        .seeds
        .par_iter()
        .map(|&seed| simulate(section, seed))
        .collect::<Result<_>>()?;

    let mut outcome = RunOutcome::default();
    let mut all_rows = Vec::new();
    for (&seed, r) in config.seeds.iter().zip(&results) {
        let rows = vec![
            KsRow {
                seed,
                series: "raw",
                n_early: r.n_early,
                n_late: r.n_late,
                ks_statistic: r.raw.statistic,
                p_value: r.raw.p_value,
            },
            KsRow {
                seed,
                series: "rescaled",
                n_early: r.n_early,
                n_late: r.n_late,
                ks_statistic: r.rescaled.statistic,
                p_value: r.rescaled.p_value,
            },
        ];
        let path = seed_file(&config.out_dir, "lemma1", seed, "csv");
        write_csv(&path, &rows)?;
        outcome.files.push(path);
        all_rows.extend(rows);
    }

    let alpha = section.significance;
    let rescaled_stationary = results.iter().all(|r| r.rescaled.p_value > alpha);
    let raw_nonstationary = results.iter().all(|r| r.raw.p_value < alpha);
    let min_p = results.iter().map(|r| r.rescaled.p_value).fold(1.0, f64::min);
    let max_p = results.iter().map(|r| r.raw.p_value).fold(0.0, f64::max);
    outcome.checks.push(Check::new(
        "rescaled_rewards_stationary",
        rescaled_stationary,
        format!("min p {min_p:.4}, need > {alpha}"),
    ));
    outcome.checks.push(Check::new(
        "raw_rewards_nonstationary",
        raw_nonstationary,
        format!("max p {max_p:.3e}, need < {alpha}"),
    ));

    let passed = outcome.checks.iter().all(|c| c.passed);
    let summary = Summary {
        experiment: "lemma1",
        section,
        rows: all_rows,
        rescaled_stationary,
        raw_nonstationary,
        checks: &outcome.checks,
        passed,
    };
    let path = summary_file(&config.out_dir, "lemma1");
    write_json(&path, &summary)?;
    outcome.files.push(path);
    Ok(outcome)
}
