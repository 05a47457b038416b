use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Form of the visit-count bonus added to a sample's mean loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplorationBonus {
    /// `alpha / sqrt(visits)`.
    #[default]
    InverseSqrt,
    /// `alpha * sqrt(2 ln(total visits) / visits)`, the classical UCB1 radius.
    Ucb1,
}

impl ExplorationBonus {
    /// Bonus for a sample visited `visits` times out of `total` visits overall.
    /// `visits` must be positive.
    pub fn value(self, alpha: f64, visits: u64, total: u64) -> f64 {
        debug_assert!(visits > 0);
        let n = visits as f64;
        match self {
            ExplorationBonus::InverseSqrt => alpha / n.sqrt(),
            ExplorationBonus::Ucb1 => {
                let t = (total.max(1)) as f64;
                alpha * (2.0 * t.ln() / n).sqrt()
            }
        }
    }
}

/// Hyperparameters of the curriculum sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurriculumConfig {
    /// Weight of the exploration bonus.
    pub alpha: f64,
    /// Mass of the uniform floor mixed into the softmax, in `[0, 1]`.
    pub epsilon: f64,
    /// Number of most recent losses averaged per sample.
    pub window_c: usize,
    /// Draws per epoch.
    pub n_epoch: usize,
    pub batch_size: usize,
    #[serde(default)]
    pub bonus: ExplorationBonus,
}

impl CurriculumConfig {
    pub const DEFAULT_ALPHA: f64 = 2.0;
    pub const DEFAULT_EPSILON: f64 = 0.2;
    pub const DEFAULT_WINDOW: usize = 5;
    pub const DEFAULT_BATCH_SIZE: usize = 4;

    /// Defaults for a dataset of `n_samples`: `alpha = 2`, `epsilon = 0.2`,
    /// `window_c = 5`, `batch_size = 4` and `n_epoch` a tenth of the dataset.
    pub fn for_dataset(n_samples: usize) -> Self {
        CurriculumConfig {
            alpha: Self::DEFAULT_ALPHA,
            epsilon: Self::DEFAULT_EPSILON,
            window_c: Self::DEFAULT_WINDOW,
            n_epoch: Self::default_n_epoch(n_samples),
            batch_size: Self::DEFAULT_BATCH_SIZE,
            bonus: ExplorationBonus::default(),
        }
    }

    /// `ceil(0.1 * n_samples)`, at least 1.
    pub fn default_n_epoch(n_samples: usize) -> usize {
        n_samples.div_ceil(10).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::invalid(
                "alpha",
                format!("must be finite and >= 0, got {}", self.alpha),
            ));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::invalid(
                "epsilon",
                format!("must lie in [0, 1], got {}", self.epsilon),
            ));
        }
        if self.window_c == 0 {
            return Err(Error::invalid("window_c", "must be at least 1"));
        }
        if self.n_epoch == 0 {
            return Err(Error::invalid("n_epoch", "must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size", "must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = CurriculumConfig::for_dataset(1000);
        assert_eq!(c.alpha, 2.0);
        assert_eq!(c.epsilon, 0.2);
        assert_eq!(c.n_epoch, 100);
        assert_eq!(CurriculumConfig::default_n_epoch(95), 10);
        assert_eq!(CurriculumConfig::default_n_epoch(1), 1);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        let mut c = CurriculumConfig::for_dataset(10);
        c.epsilon = 1.5;
        assert_eq!(c.validate().unwrap_err().field(), Some("epsilon"));
        let mut c = CurriculumConfig::for_dataset(10);
        c.alpha = -1.0;
        assert_eq!(c.validate().unwrap_err().field(), Some("alpha"));
        let mut c = CurriculumConfig::for_dataset(10);
        c.n_epoch = 0;
        assert_eq!(c.validate().unwrap_err().field(), Some("n_epoch"));
        let mut c = CurriculumConfig::for_dataset(10);
        c.window_c = 0;
        assert_eq!(c.validate().unwrap_err().field(), Some("window_c"));
    }

    #[test]
    fn ucb1_bonus_matches_classical_radius() {
        let b = ExplorationBonus::Ucb1.value(1.0, 4, 100);
        assert!((b - (2.0 * 100f64.ln() / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(ExplorationBonus::InverseSqrt.value(2.0, 4, 100), 1.0);
    }
}
