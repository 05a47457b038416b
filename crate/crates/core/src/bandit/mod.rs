//! Multi-armed bandit lab for checking the sampler's theory.
//!
//! Arms are reward distributions on `[0, 1]`. [`run_policy`] plays one of the
//! policies for a fixed horizon and records a [`PolicyTrace`] with the
//! cumulative (expected) regret. [`theorem1_bound`] evaluates the classical
//! UCB1 regret bound and [`rescale_rewards`] undoes a multiplicative reward
//! decline so that decaying rewards can be compared across time.

mod env;
mod policy;
mod theory;

pub use env::{ArmDistribution, BanditEnv, Drift};
pub use policy::{run_policy, Policy, PolicyTrace, Pull};
pub use theory::{cumulative_declines, empirical_regret, rescale_rewards, theorem1_bound};
