use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Recipe for drawing a [`SyntheticTask`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub n_samples: usize,
    /// Initial losses are uniform on this range.
    pub initial_loss: [f64; 2],
    /// Per-visit decay factors are uniform on this range.
    pub decay_rate: [f64; 2],
    pub noise_sigma: f64,
    pub forgetting_rate: f64,
}

impl TaskSpec {
    /// 1000 samples, initial loss in `[0.5, 1.5]`, decay in `[0.9, 0.999]`,
    /// 10% log-normal noise and no forgetting.
    pub fn reference() -> Self {
        TaskSpec {
            n_samples: 1000,
            initial_loss: [0.5, 1.5],
            decay_rate: [0.9, 0.999],
            noise_sigma: 0.1,
            forgetting_rate: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::invalid("n_samples", "must be at least 1"));
        }
        let [lo, hi] = self.initial_loss;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::invalid(
                "initial_loss",
                format!("need 0 < lo <= hi, got [{lo}, {hi}]"),
            ));
        }
        let [lo, hi] = self.decay_rate;
        if !(lo > 0.0 && lo <= hi && hi < 1.0) {
            return Err(Error::invalid(
                "decay_rate",
                format!("need 0 < lo <= hi < 1, got [{lo}, {hi}]"),
            ));
        }
        check_rates(self.noise_sigma, self.forgetting_rate)
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SyntheticTask> {
        self.validate()?;
        let draw = |rng: &mut R, [lo, hi]: [f64; 2]| if lo == hi { lo } else { rng.random_range(lo..hi) };
        let mut initial = Vec::with_capacity(self.n_samples);
        let mut decay = Vec::with_capacity(self.n_samples);
        for _ in 0..self.n_samples {
            initial.push(draw(rng, self.initial_loss));
            decay.push(draw(rng, self.decay_rate));
        }
        SyntheticTask::new(initial, decay, self.noise_sigma, self.forgetting_rate)
    }
}

fn check_rates(noise_sigma: f64, forgetting_rate: f64) -> Result<()> {
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(Error::invalid("noise_sigma", "must be finite and >= 0"));
    }
    if !(forgetting_rate.is_finite() && forgetting_rate >= 0.0) {
        return Err(Error::invalid("forgetting_rate", "must be finite and >= 0"));
    }
    Ok(())
}

/// Loss oracle with per-sample visit and staleness counters.
///
/// The true loss after `v` visits and `s` epochs without a visit is
/// `min(L0, L0 * rho^v * (1 + phi)^s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTask {
    initial_losses: Vec<f64>,
    decay_rates: Vec<f64>,
    noise_sigma: f64,
    forgetting_rate: f64,
    visits: Vec<u64>,
    staleness: Vec<u64>,
    touched: Vec<bool>,
}

impl SyntheticTask {
    pub fn new(
        initial_losses: Vec<f64>,
        decay_rates: Vec<f64>,
        noise_sigma: f64,
        forgetting_rate: f64,
    ) -> Result<Self> {
        if initial_losses.is_empty() {
            return Err(Error::Empty("initial_losses"));
        }
        if initial_losses.len() != decay_rates.len() {
            return Err(Error::invalid("decay_rates", "length differs from initial_losses"));
        }
        if let Some(i) = initial_losses.iter().position(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::invalid(format!("initial_losses[{i}]"), "must be positive"));
        }
        if let Some(i) = decay_rates.iter().position(|r| !(*r > 0.0 && *r < 1.0)) {
            return Err(Error::invalid(format!("decay_rates[{i}]"), "must lie in (0, 1)"));
        }
        check_rates(noise_sigma, forgetting_rate)?;
        let n = initial_losses.len();
        Ok(SyntheticTask {
            initial_losses,
            decay_rates,
            noise_sigma,
            forgetting_rate,
            visits: vec![0; n],
            staleness: vec![0; n],
            touched: vec![false; n],
        })
    }

    pub fn n_samples(&self) -> usize {
        self.initial_losses.len()
    }

    pub fn initial_losses(&self) -> &[f64] {
        &self.initial_losses
    }

    pub fn visits(&self) -> &[u64] {
        &self.visits
    }

    pub fn staleness(&self) -> &[u64] {
        &self.staleness
    }

    fn check_id(&self, id: usize) -> Result<()> {
        if id < self.initial_losses.len() {
            Ok(())
        } else {
            Err(Error::UnknownIndex {
                kind: "sample",
                index: id,
                len: self.initial_losses.len(),
            })
        }
    }

    /// Noise-free loss of `id`.
    pub fn true_loss(&self, id: usize) -> Result<f64> {
        self.check_id(id)?;
        Ok(self.true_loss_unchecked(id))
    }

    fn true_loss_unchecked(&self, id: usize) -> f64 {
        let l0 = self.initial_losses[id];
        let decayed = l0 * self.decay_rates[id].powf(self.visits[id] as f64);
        let regrown = decayed * (1.0 + self.forgetting_rate).powf(self.staleness[id] as f64);
        regrown.min(l0)
    }

    /// Returns the current loss with multiplicative log-normal noise, then
    /// applies one visit's decay and clears the sample's staleness.
    pub fn observe_loss<R: Rng + ?Sized>(&mut self, id: usize, rng: &mut R) -> Result<f64> {
        self.check_id(id)?;
        let z: f64 = StandardNormal.sample(rng);
        let observed = self.true_loss_unchecked(id) * (self.noise_sigma * z).exp();
        self.visits[id] += 1;
        self.staleness[id] = 0;
        self.touched[id] = true;
        Ok(observed)
    }

    /// Closes an epoch: every sample not observed during it grows one epoch
    /// staler.
    pub fn end_epoch(&mut self) {
        for (s, t) in self.staleness.iter_mut().zip(self.touched.iter_mut()) {
            if !*t {
                *s += 1;
            }
            *t = false;
        }
    }

    pub fn true_losses(&self) -> Vec<f64> {
        (0..self.n_samples()).map(|i| self.true_loss_unchecked(i)).collect()
    }

    pub fn mean_true_loss(&self) -> f64 {
        self.true_losses().iter().sum::<f64>() / self.n_samples() as f64
    }

    pub fn max_true_loss(&self) -> f64 {
        self.true_losses().into_iter().fold(0.0, f64::max)
    }

    pub fn max_staleness(&self) -> u64 {
        self.staleness.iter().copied().max().unwrap_or(0)
    }
}
