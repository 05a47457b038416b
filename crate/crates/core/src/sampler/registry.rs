use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::CurriculumConfig;
use super::distribution::{distribution, make_batches, rescale_weights, sample_epoch};
use super::state::{check_loss, SampleState, Weight};
use crate::error::{Error, Result};
use crate::rng::seeded;

/// States for a whole dataset plus the epoch counter.
///
/// Mutation goes through `&mut self`; planning an epoch only borrows, so a
/// snapshot can be sampled from several threads.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerRegistry {
    config: CurriculumConfig,
    states: Vec<SampleState>,
    epoch_index: u64,
}

/// On-disk form of a registry.
#[derive(Serialize, Deserialize)]
struct Checkpoint {
    config: CurriculumConfig,
    epoch_index: u64,
    states: Vec<SampleState>,
}

impl SamplerRegistry {
    pub fn new(n_samples: usize, config: CurriculumConfig) -> Result<Self> {
        config.validate()?;
        if n_samples == 0 {
            return Err(Error::Empty("dataset"));
        }
        Ok(SamplerRegistry {
            config,
            states: (0..n_samples).map(SampleState::new).collect(),
            epoch_index: 0,
        })
    }

    pub fn config(&self) -> &CurriculumConfig {
        &self.config
    }

    pub fn states(&self) -> &[SampleState] {
        &self.states
    }

    pub fn state(&self, id: usize) -> Result<&SampleState> {
        self.states.get(id).ok_or(Error::UnknownIndex {
            kind: "sample",
            index: id,
            len: self.states.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn epoch_index(&self) -> u64 {
        self.epoch_index
    }

    pub fn total_visits(&self) -> u64 {
        self.states.iter().map(SampleState::visit_count).sum()
    }

    pub fn record_loss(&mut self, id: usize, loss: f64) -> Result<()> {
        let len = self.states.len();
        let window = self.config.window_c;
        let state = self.states.get_mut(id).ok_or(Error::UnknownIndex {
            kind: "sample",
            index: id,
            len,
        })?;
        state.record(loss, window)
    }

    /// Records every pair in order, or none of them if any pair is invalid.
    pub fn report_losses(&mut self, pairs: &[(usize, f64)]) -> Result<()> {
        for &(id, loss) in pairs {
            self.state(id)?;
            check_loss(loss)?;
        }
        for &(id, loss) in pairs {
            self.record_loss(id, loss)?;
        }
        Ok(())
    }

    /// Priority of every sample under the configured bonus.
    pub fn weights(&self) -> Vec<Weight> {
        let total = self.total_visits();
        let alpha = self.config.alpha;
        let bonus = self.config.bonus;
        self.states
            .iter()
            .map(|s| match s.mean_loss() {
                Some(mean) => Weight::Visited(mean + bonus.value(alpha, s.visit_count(), total)),
                None => Weight::Unvisited,
            })
            .collect()
    }

    /// Sampling distribution for the current epoch. Uniform while no sample
    /// has been visited.
    pub fn epoch_distribution(&self) -> Result<Vec<f64>> {
        let rescaled = rescale_weights(&self.weights())?;
        distribution(&rescaled, self.config.epsilon)
    }

    /// Draws the current epoch's samples and groups them into batches
    /// without touching the registry.
    pub fn plan_epoch<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<Vec<usize>>> {
        let probs = self.epoch_distribution()?;
        let ids = sample_epoch(&probs, self.config.n_epoch, rng)?;
        make_batches(&ids, self.config.batch_size)
    }

    /// Plans the current epoch and advances the epoch counter.
    pub fn next_epoch<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Vec<Vec<usize>>> {
        let batches = self.plan_epoch(rng)?;
        self.epoch_index += 1;
        Ok(batches)
    }

    /// [`next_epoch`](Self::next_epoch) with a fresh random source for `seed`.
    pub fn next_epoch_seeded(&mut self, seed: u64) -> Result<Vec<Vec<usize>>> {
        self.next_epoch(&mut seeded(seed))
    }

    pub fn to_json(&self) -> String {
        let cp = Checkpoint {
            config: self.config.clone(),
            epoch_index: self.epoch_index,
            states: self.states.clone(),
        };
        serde_json::to_string_pretty(&cp).expect("registry serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let cp: Checkpoint = serde_json::from_str(json).map_err(|e| Error::invalid("checkpoint", e.to_string()))?;
        cp.config.validate()?;
        if cp.states.is_empty() {
            return Err(Error::Empty("checkpoint states"));
        }
        let mut states = Vec::with_capacity(cp.states.len());
        for (i, s) in cp.states.into_iter().enumerate() {
            if s.id != i {
                return Err(Error::invalid(
                    format!("states[{i}].id"),
                    format!("expected {i}, found {}", s.id),
                ));
            }
            let losses: Vec<f64> = s.recent_losses().iter().copied().collect();
            states.push(SampleState::from_parts(i, losses, s.visit_count(), cp.config.window_c)?);
        }
        Ok(SamplerRegistry {
            config: cp.config,
            states,
            epoch_index: cp.epoch_index,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::ExplorationBonus;

    fn config(n: usize) -> CurriculumConfig {
        CurriculumConfig::for_dataset(n)
    }

    #[test]
    fn fresh_registry_is_uniform() {
        let r = SamplerRegistry::new(8, config(8)).unwrap();
        let p = r.epoch_distribution().unwrap();
        assert!(p.iter().all(|&x| (x - 0.125).abs() < 1e-15));
    }

    #[test]
    fn unknown_id() {
        let mut r = SamplerRegistry::new(3, config(3)).unwrap();
        assert!(matches!(
            r.record_loss(3, 0.1),
            Err(Error::UnknownIndex { index: 3, .. })
        ));
    }

    #[test]
    fn report_losses_is_atomic() {
        let mut r = SamplerRegistry::new(3, config(3)).unwrap();
        let before = r.clone();
        assert!(r.report_losses(&[(0, 0.5), (1, f64::NAN)]).is_err());
        assert_eq!(r, before);
        assert!(r.report_losses(&[(0, 0.5), (5, 0.1)]).is_err());
        assert_eq!(r, before);
        r.report_losses(&[]).unwrap();
        assert_eq!(r, before);
        r.report_losses(&[(0, 0.5)]).unwrap();
        let mut direct = before.clone();
        direct.record_loss(0, 0.5).unwrap();
        assert_eq!(r, direct);
    }

    #[test]
    fn less_visited_gets_priority() {
        let mut r = SamplerRegistry::new(3, config(3)).unwrap();
        r.record_loss(0, 0.4).unwrap();
        for _ in 0..4 {
            r.record_loss(1, 0.4).unwrap();
        }
        let w = r.weights();
        assert!(w[0].finite().unwrap() > w[1].finite().unwrap());
        assert_eq!(w[2], Weight::Unvisited);
        let p = r.epoch_distribution().unwrap();
        assert!(p[2] > p[1] && p[0] > p[1]);
        assert_eq!(p[0], p[2]);
    }

    #[test]
    fn ucb1_bonus_is_selectable() {
        let mut c = config(2);
        c.bonus = ExplorationBonus::Ucb1;
        c.alpha = 1.0;
        let mut r = SamplerRegistry::new(2, c).unwrap();
        r.report_losses(&[(0, 0.5), (1, 0.5), (1, 0.5), (0, 0.5)]).unwrap();
        let expected = 0.5 + (2.0 * 4f64.ln() / 2.0).sqrt();
        assert!((r.weights()[0].finite().unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn epoch_counter_and_batches() {
        let mut c = config(20);
        c.n_epoch = 7;
        c.batch_size = 3;
        let mut r = SamplerRegistry::new(20, c).unwrap();
        let b = r.next_epoch_seeded(5).unwrap();
        assert_eq!(b.iter().map(Vec::len).collect::<Vec<_>>(), vec![3, 3, 1]);
        assert_eq!(r.epoch_index(), 1);
        let mut again = SamplerRegistry::new(20, r.config().clone()).unwrap();
        assert_eq!(again.next_epoch_seeded(5).unwrap(), b);
    }

    #[test]
    fn checkpoint_roundtrip_is_exact() {
        let mut r = SamplerRegistry::new(4, config(4)).unwrap();
        r.report_losses(&[(0, 0.1), (0, 1.0 / 3.0), (3, 2.5e-17)]).unwrap();
        // shortest-repr values that a lossy float parser gets wrong in the last ulp
        r.report_losses(&[(1, 0.47011917075197956), (2, 0.9753309344349409)])
            .unwrap();
        r.next_epoch_seeded(1).unwrap();
        let json = r.to_json();
        let back = SamplerRegistry::from_json(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn checkpoint_rejects_corruption() {
        let r = SamplerRegistry::new(2, config(2)).unwrap();
        let json = r.to_json().replace("\"id\": 1", "\"id\": 4");
        assert!(SamplerRegistry::from_json(&json).is_err());
        let json = r.to_json().replace("\"epsilon\": 0.2", "\"epsilon\": 1.5");
        assert_eq!(SamplerRegistry::from_json(&json).unwrap_err().field(), Some("epsilon"));
    }
}
