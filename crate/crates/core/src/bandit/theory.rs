use std::f64::consts::PI;

use super::policy::PolicyTrace;
use crate::error::{Error, Result};

/// Upper bound on the expected regret of UCB1 after `n` plays:
/// `8 * sum_{i: mu_i < mu*} ln(n) / delta_i + (1 + pi^2 / 3) * sum_j delta_j`
/// with `delta_i = mu* - mu_i`.
pub fn theorem1_bound(means: &[f64], n: u64) -> Result<f64> {
    if means.is_empty() {
        return Err(Error::Empty("means"));
    }
    if let Some(i) = means.iter().position(|m| !(0.0..=1.0).contains(m)) {
        return Err(Error::invalid(
            format!("means[{i}]"),
            format!("must lie in [0, 1], got {}", means[i]),
        ));
    }
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    let best = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ln_n = (n as f64).ln();
    let mut log_term = 0.0;
    let mut gap_sum = 0.0;
    for &mu in means {
        let delta = best - mu;
        if delta > 0.0 {
            log_term += ln_n / delta;
            gap_sum += delta;
        }
    }
    Ok(8.0 * log_term + (1.0 + PI * PI / 3.0) * gap_sum)
}

/// `prod_{j < t} d_j` for `t = 1 ..= ratios.len() + 1`.
pub fn cumulative_declines(ratios: &[f64]) -> Result<Vec<f64>> {
    if let Some(i) = ratios.iter().position(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::invalid(
            format!("decline_ratios[{i}]"),
            format!("must be positive, got {}", ratios[i]),
        ));
    }
    let mut out = Vec::with_capacity(ratios.len() + 1);
    let mut acc = 1.0;
    out.push(acc);
    for &d in ratios {
        acc *= d;
        out.push(acc);
    }
    Ok(out)
}

/// Divides the reward at step `t` (counted from 1) of every sequence by the
/// cumulative decline `d_1 * ... * d_{t-1}`.
///
/// With rewards `X * d_1 * ... * d_{t-1}` this recovers `X` at every step.
pub fn rescale_rewards(sequences: &[Vec<f64>], decline_ratios: &[f64]) -> Result<Vec<Vec<f64>>> {
    let cumulative = cumulative_declines(decline_ratios)?;
    sequences
        .iter()
        .enumerate()
        .map(|(s, seq)| {
            if seq.len() > cumulative.len() {
                return Err(Error::invalid(
                    format!("sequences[{s}]"),
                    format!("{} steps but only {} decline ratios", seq.len(), decline_ratios.len()),
                ));
            }
            Ok(seq.iter().zip(&cumulative).map(|(r, c)| r / c).collect())
        })
        .collect()
}

/// `sum over pulls of (max mean - mean of the pulled arm)`.
pub fn empirical_regret(trace: &PolicyTrace, means: &[f64]) -> Result<f64> {
    let best = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    trace.pulls.iter().try_fold(0.0, |acc, p| {
        means.get(p.arm).map(|mu| acc + (best - mu)).ok_or(Error::UnknownIndex {
            kind: "arm",
            index: p.arm,
            len: means.len(),
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandit::Pull;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bound_values() {
        // High-precision evaluations of the bound formula.
        assert_abs_diff_eq!(
            theorem1_bound(&[0.9, 0.6], 10_000).unwrap(),
            246.896_037_026_140_48,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            theorem1_bound(&[0.9, 0.6], 1_000).unwrap(),
            185.493_767_879_632_6,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            theorem1_bound(&[0.9, 0.6], 100_000).unwrap(),
            308.298_306_172_648_4,
            epsilon = 1e-9
        );
        assert_eq!(theorem1_bound(&[0.7], 100).unwrap(), 0.0);
        assert_eq!(theorem1_bound(&[0.5, 0.5], 100).unwrap(), 0.0);
        assert!(theorem1_bound(&[0.5, 1.5], 100).is_err());
        assert!(theorem1_bound(&[], 100).is_err());
    }

    #[test]
    fn exact_cancellation() {
        let seq: Vec<f64> = (0..50).map(|t| 0.8 * 0.9f64.powi(t)).collect();
        let out = rescale_rewards(&[seq], &[0.9; 49]).unwrap();
        assert!(out[0].iter().all(|&r| (r - 0.8).abs() < 1e-12));
    }

    #[test]
    fn unit_ratios_are_identity() {
        let seq = vec![0.3, 0.1, 0.7];
        assert_eq!(
            rescale_rewards(std::slice::from_ref(&seq), &[1.0, 1.0]).unwrap(),
            vec![seq]
        );
    }

    #[test]
    fn rejects_nonpositive_ratios() {
        assert!(rescale_rewards(&[vec![1.0, 1.0]], &[0.0]).is_err());
        assert!(rescale_rewards(&[vec![1.0, 1.0]], &[-0.5]).is_err());
        assert!(rescale_rewards(&[vec![1.0, 1.0, 1.0]], &[0.5]).is_err());
    }

    fn trace(arms: &[usize]) -> PolicyTrace {
        PolicyTrace {
            policy: "test".into(),
            pulls: arms
                .iter()
                .enumerate()
                .map(|(i, &arm)| Pull {
                    step: i as u64 + 1,
                    arm,
                    reward: 0.0,
                })
                .collect(),
            cumulative_regret: vec![],
        }
    }

    #[test]
    fn regret_accounting() {
        let means = [0.9, 0.6];
        assert_eq!(empirical_regret(&trace(&[0; 10]), &means).unwrap(), 0.0);
        assert_abs_diff_eq!(
            empirical_regret(&trace(&[1; 10]), &means).unwrap(),
            3.0,
            epsilon = 1e-12
        );
        assert_eq!(empirical_regret(&trace(&[]), &means).unwrap(), 0.0);
        assert!(matches!(
            empirical_regret(&trace(&[2]), &means),
            Err(Error::UnknownIndex { index: 2, .. })
        ));
    }
}
