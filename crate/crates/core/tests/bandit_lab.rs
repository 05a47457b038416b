use curricula::bandit::{rescale_rewards, run_policy, theorem1_bound, ArmDistribution, BanditEnv, Drift, Policy};
use curricula::rng::seeded;
use curricula::stats::{ks_two_sample, mean};
use rand::Rng;

fn two_arms() -> BanditEnv {
    BanditEnv::bernoulli(&[0.9, 0.6]).unwrap()
}

#[test]
fn softmax_policy_keeps_the_uniform_floor() {
    // Every pull after initialization gives each arm probability >= eps / K,
    // so each count dominates a Binomial(n - K, eps / K).
    for (means, seed) in [(vec![0.9, 0.6], 3u64), (vec![0.9, 0.8, 0.5, 0.2, 0.1], 4)] {
        let env = BanditEnv::bernoulli(&means).unwrap();
        let k = means.len() as f64;
        let n = 10_000u64;
        let trace = run_policy(&env, &Policy::curriculum_softmax(), n, &mut seeded(seed)).unwrap();
        let p = 0.2 / k;
        let trials = n as f64 - k;
        let floor = p * trials - 4.0 * (trials * p * (1.0 - p)).sqrt();
        for (arm, &c) in trace.pull_counts(means.len()).iter().enumerate() {
            assert!(c as f64 >= floor, "arm {arm}: {c} pulls, floor {floor:.1}");
        }
    }
}

#[test]
fn ucb1_mean_regret_respects_the_bound_at_small_horizon() {
    let env = two_arms();
    let n = 1000;
    let regrets: Vec<f64> = (0..30)
        .map(|s| run_policy(&env, &Policy::ucb1(), n, &mut seeded(s)).unwrap().regret())
        .collect();
    let bound = theorem1_bound(&[0.9, 0.6], n).unwrap();
    assert!((bound - 185.4937678796326).abs() < 1e-9);
    assert!(mean(&regrets) <= bound);
}

#[test]
fn ucb1_regret_grows_sublinearly() {
    let env = two_arms();
    let trace = run_policy(&env, &Policy::ucb1(), 100_000, &mut seeded(11)).unwrap();
    let r3 = trace.regret_at(1000).unwrap();
    let r5 = trace.regret_at(100_000).unwrap();
    // Linear growth would multiply regret by 100.
    assert!(r5 < 10.0 * r3.max(1.0), "{r3} -> {r5}");
}

#[test]
fn rotating_best_arm_inflates_ucb1_regret() {
    let stationary = two_arms();
    let rotating = BanditEnv::new(stationary.arms.clone(), Drift::Rotating { period: 25_000 }).unwrap();
    let (mut d, mut s) = (0.0, 0.0);
    for seed in 0..5 {
        d += run_policy(&rotating, &Policy::ucb1(), 100_000, &mut seeded(seed))
            .unwrap()
            .regret();
        s += run_policy(&stationary, &Policy::ucb1(), 100_000, &mut seeded(seed))
            .unwrap()
            .regret();
    }
    assert!(d / s > 5.0, "ratio {}", d / s);
}

#[test]
fn rescaling_restores_stationarity() {
    let ratios = vec![0.95; 99];
    let mut rng = seeded(21);
    let raw: Vec<Vec<f64>> = (0..100)
        .map(|_| {
            let mut scale = 1.0;
            (0..100)
                .map(|t| {
                    if t > 0 {
                        scale *= 0.95;
                    }
                    rng.random::<f64>() * scale
                })
                .collect()
        })
        .collect();
    let rescaled = rescale_rewards(&raw, &ratios).unwrap();
    let stratum = |seqs: &[Vec<f64>], lo: usize, hi: usize| -> Vec<f64> {
        seqs.iter().flat_map(|s| s[lo..hi].iter().copied()).collect()
    };
    let fixed = ks_two_sample(&stratum(&rescaled, 0, 10), &stratum(&rescaled, 90, 100)).unwrap();
    let drifting = ks_two_sample(&stratum(&raw, 0, 10), &stratum(&raw, 90, 100)).unwrap();
    assert!(fixed.p_value > 0.01, "{fixed:?}");
    assert!(drifting.p_value < 0.01, "{drifting:?}");
}

#[test]
fn scaled_beta_arms_run_under_every_policy() {
    let env = BanditEnv::stationary(vec![
        ArmDistribution::Beta {
            a: 2.0,
            b: 5.0,
            scale: 1.0,
        },
        ArmDistribution::Beta {
            a: 5.0,
            b: 2.0,
            scale: 0.8,
        },
    ])
    .unwrap();
    for policy in [
        Policy::ucb1(),
        Policy::curriculum_softmax(),
        Policy::Uniform,
        Policy::greedy_loss(),
    ] {
        let trace = run_policy(&env, &policy, 500, &mut seeded(1)).unwrap();
        assert_eq!(trace.pulls.len(), 500);
        assert!(trace.pulls.iter().all(|p| (0.0..=1.0).contains(&p.reward)));
    }
}
