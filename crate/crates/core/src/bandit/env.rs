use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reward distribution of one arm, supported on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArmDistribution {
    Bernoulli {
        mean: f64,
    },
    /// `scale * Beta(a, b)`, supported on `[0, scale]`.
    Beta {
        a: f64,
        b: f64,
        scale: f64,
    },
}

impl ArmDistribution {
    pub fn mean(&self) -> f64 {
        match *self {
            ArmDistribution::Bernoulli { mean } => mean,
            ArmDistribution::Beta { a, b, scale } => scale * a / (a + b),
        }
    }

    fn validate(&self, arm: usize) -> Result<()> {
        match *self {
            ArmDistribution::Bernoulli { mean } if !(0.0..=1.0).contains(&mean) => Err(Error::invalid(
                format!("arms[{arm}].mean"),
                format!("must lie in [0, 1], got {mean}"),
            )),
            ArmDistribution::Beta { a, b, .. } if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) => {
                Err(Error::invalid(format!("arms[{arm}]"), "beta shapes must be positive"))
            }
            ArmDistribution::Beta { scale, .. } if !(scale > 0.0 && scale <= 1.0) => Err(Error::invalid(
                format!("arms[{arm}].scale"),
                format!("must lie in (0, 1], got {scale}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ArmDistribution::Bernoulli { mean } => {
                if rng.random::<f64>() < mean {
                    1.0
                } else {
                    0.0
                }
            }
            ArmDistribution::Beta { a, b, scale } => scale * Beta::new(a, b).expect("validated shapes").sample(rng),
        }
    }
}

/// How the arms change over time. Steps are counted from 1.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Drift {
    #[default]
    Stationary,
    /// Rewards at step `t` are multiplied by `ratios[0] * ... * ratios[t - 2]`.
    Decline { ratios: Vec<f64> },
    /// Every `period` steps the arms rotate: during segment `k` arm `i`
    /// pays like arm `(i + k) mod K`.
    Rotating { period: u64 },
}

/// A set of arms plus their drift over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditEnv {
    pub arms: Vec<ArmDistribution>,
    #[serde(default)]
    pub drift: Drift,
}

impl BanditEnv {
    pub fn new(arms: Vec<ArmDistribution>, drift: Drift) -> Result<Self> {
        let env = BanditEnv { arms, drift };
        env.validate()?;
        Ok(env)
    }

    pub fn stationary(arms: Vec<ArmDistribution>) -> Result<Self> {
        Self::new(arms, Drift::Stationary)
    }

    /// Stationary Bernoulli arms with the given means.
    pub fn bernoulli(means: &[f64]) -> Result<Self> {
        Self::stationary(means.iter().map(|&mean| ArmDistribution::Bernoulli { mean }).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.arms.is_empty() {
            return Err(Error::Empty("arms"));
        }
        for (i, a) in self.arms.iter().enumerate() {
            a.validate(i)?;
        }
        match &self.drift {
            Drift::Decline { ratios } => {
                if let Some(i) = ratios.iter().position(|d| !(d.is_finite() && *d > 0.0)) {
                    return Err(Error::invalid(format!("drift.ratios[{i}]"), "must be positive"));
                }
            }
            Drift::Rotating { period } if *period == 0 => {
                return Err(Error::invalid("drift.period", "must be at least 1"));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn n_arms(&self) -> usize {
        self.arms.len()
    }

    /// Means at step 1.
    pub fn base_means(&self) -> Vec<f64> {
        self.arms.iter().map(ArmDistribution::mean).collect()
    }

    fn source_arm(&self, arm: usize, step: u64) -> usize {
        match self.drift {
            Drift::Rotating { period } => {
                let segment = ((step - 1) / period) as usize;
                (arm + segment) % self.arms.len()
            }
            _ => arm,
        }
    }

    fn scale_at(&self, step: u64) -> f64 {
        match &self.drift {
            Drift::Decline { ratios } => {
                let upto = (step as usize).saturating_sub(1);
                assert!(
                    upto <= ratios.len(),
                    "decline schedule covers {} steps, step {step} requested",
                    ratios.len() + 1
                );
                ratios[..upto].iter().product()
            }
            _ => 1.0,
        }
    }

    /// Number of steps the drift schedule covers, if bounded.
    pub fn max_horizon(&self) -> Option<u64> {
        match &self.drift {
            Drift::Decline { ratios } => Some(ratios.len() as u64 + 1),
            _ => None,
        }
    }

    /// Expected reward of every arm at `step`.
    pub fn expected_rewards(&self, step: u64) -> Vec<f64> {
        let scale = self.scale_at(step);
        (0..self.arms.len())
            .map(|i| self.arms[self.source_arm(i, step)].mean() * scale)
            .collect()
    }

    /// One reward from `arm` at `step`.
    pub fn pull<R: Rng + ?Sized>(&self, arm: usize, step: u64, rng: &mut R) -> f64 {
        self.pull_scaled(arm, step, self.scale_at(step), rng)
    }

    /// Per-step reward multipliers for steps `1..=horizon`.
    pub(crate) fn scales(&self, horizon: u64) -> Vec<f64> {
        match &self.drift {
            Drift::Decline { ratios } => {
                let mut out = Vec::with_capacity(horizon as usize);
                let mut acc = 1.0;
                for t in 0..horizon as usize {
                    if t > 0 {
                        acc *= ratios[t - 1];
                    }
                    out.push(acc);
                }
                out
            }
            _ => vec![1.0; horizon as usize],
        }
    }

    pub(crate) fn expected_scaled(&self, step: u64, scale: f64) -> impl Iterator<Item = f64> + '_ {
        (0..self.arms.len()).map(move |i| self.arms[self.source_arm(i, step)].mean() * scale)
    }

    pub(crate) fn pull_scaled<R: Rng + ?Sized>(&self, arm: usize, step: u64, scale: f64, rng: &mut R) -> f64 {
        self.arms[self.source_arm(arm, step)].sample(rng) * scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn validation() {
        assert!(BanditEnv::bernoulli(&[0.5, 1.2]).is_err());
        assert!(BanditEnv::bernoulli(&[]).is_err());
        assert!(BanditEnv::stationary(vec![ArmDistribution::Beta {
            a: 1.0,
            b: 1.0,
            scale: 1.5
        }])
        .is_err());
        assert!(BanditEnv::new(
            vec![ArmDistribution::Bernoulli { mean: 0.5 }],
            Drift::Decline { ratios: vec![0.9, 0.0] }
        )
        .is_err());
    }

    #[test]
    fn beta_mean_and_support() {
        let arm = ArmDistribution::Beta {
            a: 2.0,
            b: 6.0,
            scale: 0.8,
        };
        assert!((arm.mean() - 0.2).abs() < 1e-15);
        let mut rng = seeded(1);
        let draws: Vec<f64> = (0..20_000).map(|_| arm.sample(&mut rng)).collect();
        assert!(draws.iter().all(|x| (0.0..=0.8).contains(x)));
        let m = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!((m - 0.2).abs() < 0.005);
    }

    #[test]
    fn decline_expectation() {
        let env = BanditEnv::new(
            vec![ArmDistribution::Bernoulli { mean: 0.8 }],
            Drift::Decline {
                ratios: vec![0.5, 0.5, 0.9],
            },
        )
        .unwrap();
        assert_eq!(env.expected_rewards(1), vec![0.8]);
        assert_eq!(env.expected_rewards(3), vec![0.2]);
        assert!((env.expected_rewards(4)[0] - 0.18).abs() < 1e-15);
        assert_eq!(env.max_horizon(), Some(4));
    }

    #[test]
    fn rotation_swaps_best_arm() {
        let mut env = BanditEnv::bernoulli(&[0.9, 0.6]).unwrap();
        env.drift = Drift::Rotating { period: 10 };
        assert_eq!(env.expected_rewards(10), vec![0.9, 0.6]);
        assert_eq!(env.expected_rewards(11), vec![0.6, 0.9]);
        assert_eq!(env.expected_rewards(21), vec![0.9, 0.6]);
    }
}
