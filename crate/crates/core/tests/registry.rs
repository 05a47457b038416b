use curricula::rng::seeded;
use curricula::sampler::{format_log, parse_log, CurriculumConfig, Operation, SamplerRegistry};
use proptest::prelude::*;
use rand::Rng;

fn session(n: usize, epochs: usize, seed: u64) -> Vec<Operation> {
    let mut registry = SamplerRegistry::new(n, CurriculumConfig::for_dataset(n)).unwrap();
    let mut rng = seeded(seed);
    let mut ops = Vec::new();
    for _ in 0..epochs {
        let op = Operation::NextEpoch { seed: rng.random() };
        let batches = registry.apply(&op).unwrap().unwrap();
        ops.push(op);
        for batch in batches {
            let pairs = batch.iter().map(|&id| (id, rng.random::<f64>() * 3.0)).collect();
            let op = Operation::ReportLosses { pairs };
            registry.apply(&op).unwrap();
            ops.push(op);
        }
    }
    ops
}

#[test]
fn resuming_from_a_checkpoint_matches_an_uninterrupted_replay() {
    let n = 60;
    let ops = session(n, 5, 9);
    let fresh = || SamplerRegistry::new(n, CurriculumConfig::for_dataset(n)).unwrap();

    let mut whole = fresh();
    whole.replay(&ops).unwrap();

    let cut = ops.len() / 2;
    let mut first = fresh();
    first.replay(&ops[..cut]).unwrap();
    let mut resumed = SamplerRegistry::from_json(&first.to_json()).unwrap();
    let tail = parse_log(&format_log(&ops[cut..])).unwrap();
    resumed.replay(&tail).unwrap();

    assert_eq!(resumed.to_json(), whole.to_json());
    assert_eq!(whole.epoch_index(), 5);
}

proptest! {
    #[test]
    fn state_invariants_hold_under_any_report_sequence(
        window in 1usize..6,
        reports in prop::collection::vec((0usize..8, 0.0f64..10.0), 0..80),
    ) {
        let mut config = CurriculumConfig::for_dataset(8);
        config.window_c = window;
        let mut registry = SamplerRegistry::new(8, config).unwrap();
        let mut expected = [0u64; 8];
        for &(id, loss) in &reports {
            registry.record_loss(id, loss).unwrap();
            expected[id] += 1;
        }
        for (id, state) in registry.states().iter().enumerate() {
            prop_assert_eq!(state.id, id);
            prop_assert_eq!(state.visit_count(), expected[id]);
            prop_assert!(state.recent_losses().len() <= window);
            prop_assert!(state.recent_losses().len() as u64 == expected[id].min(window as u64));
        }
        prop_assert_eq!(registry.total_visits(), reports.len() as u64);
        let probs = registry.epoch_distribution().unwrap();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
}
