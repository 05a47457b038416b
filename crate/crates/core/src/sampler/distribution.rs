use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::state::Weight;
use crate::error::{Error, Result};

/// Maps weights onto `[0, 1]` by min-max scaling.
///
/// Unvisited entries first take the largest finite weight. When every entry
/// is equal (or none is finite) each output is 0.5.
pub fn rescale_weights(weights: &[Weight]) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(Error::Empty("weights"));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, w) in weights.iter().enumerate() {
        if let Weight::Visited(v) = *w {
            if !v.is_finite() {
                return Err(Error::invalid(format!("weights[{i}]"), "must be finite"));
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !hi.is_finite() || hi <= lo {
        return Ok(vec![0.5; weights.len()]);
    }
    let span = hi - lo;
    Ok(weights
        .iter()
        .map(|w| match *w {
            Weight::Visited(v) => ((v - lo) / span).clamp(0.0, 1.0),
            Weight::Unvisited => 1.0,
        })
        .collect())
}

/// `(1 - epsilon) * softmax(w) + epsilon / n` over weights already in `[0, 1]`.
pub fn distribution(rescaled: &[f64], epsilon: f64) -> Result<Vec<f64>> {
    if rescaled.is_empty() {
        return Err(Error::Empty("weights"));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::invalid("epsilon", format!("must lie in [0, 1], got {epsilon}")));
    }
    if let Some(i) = rescaled.iter().position(|w| !(0.0..=1.0).contains(w)) {
        return Err(Error::invalid(
            format!("weights[{i}]"),
            format!("must lie in [0, 1], got {}", rescaled[i]),
        ));
    }
    let n = rescaled.len() as f64;
    // Inputs are bounded by 1, so exp cannot overflow and no shift is needed.
    let exps: Vec<f64> = rescaled.iter().map(|w| w.exp()).collect();
    let total: f64 = exps.iter().sum();
    let floor = epsilon / n;
    let scale = 1.0 - epsilon;
    Ok(exps.into_iter().map(|e| scale * (e / total) + floor).collect())
}

/// Uniform distribution over `n` entries.
pub fn uniform(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Empty("distribution"));
    }
    Ok(vec![1.0 / n as f64; n])
}

/// Draws `n_epoch` indices i.i.d. with replacement from `probs`.
///
/// Building the sampler is linear in `probs`, each draw is logarithmic.
pub fn sample_epoch<R: Rng + ?Sized>(probs: &[f64], n_epoch: usize, rng: &mut R) -> Result<Vec<usize>> {
    if n_epoch == 0 {
        return Err(Error::invalid("n_epoch", "must be at least 1"));
    }
    if probs.is_empty() {
        return Err(Error::Empty("distribution"));
    }
    if let Some(i) = probs.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::invalid(format!("distribution[{i}]"), "must be finite and >= 0"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("distribution", format!("sums to {total}, expected 1")));
    }
    let index = WeightedIndex::new(probs).map_err(|e| Error::invalid("distribution", e.to_string()))?;
    Ok((0..n_epoch).map(|_| index.sample(rng)).collect())
}

/// Consecutive chunks of `batch_size`; the last one may be shorter.
pub fn make_batches(ids: &[usize], batch_size: usize) -> Result<Vec<Vec<usize>>> {
    if ids.is_empty() {
        return Err(Error::Empty("ids"));
    }
    if batch_size == 0 {
        return Err(Error::invalid("batch_size", "must be at least 1"));
    }
    Ok(ids.chunks(batch_size).map(<[usize]>::to_vec).collect())
}
