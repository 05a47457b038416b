//! Easy-to-hard selection of negative anchors.
//!
//! A negative anchor's confidence is the model's probability for its true
//! (negative) class. Training starts on negatives inside a high-confidence
//! window `[xi, eta]` and the window slides linearly down to `[0, eta_end]`,
//! where it only admits negatives the model gets wrong.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear descent of the confidence window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorSchedule {
    pub xi_start: f64,
    pub eta_start: f64,
    pub eta_end: f64,
    pub total_steps: u64,
}

impl AnchorSchedule {
    pub const DEFAULT_XI_START: f64 = 0.5;
    pub const DEFAULT_ETA_START: f64 = 1.0;
    pub const DEFAULT_ETA_END: f64 = 0.3;

    /// Default window `[0.5, 1.0] -> [0, 0.3]` over `total_steps`.
    pub fn new(total_steps: u64) -> Result<Self> {
        let s = AnchorSchedule {
            xi_start: Self::DEFAULT_XI_START,
            eta_start: Self::DEFAULT_ETA_START,
            eta_end: Self::DEFAULT_ETA_END,
            total_steps,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |field: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::invalid(field, format!("must lie in [0, 1], got {v}")))
            }
        };
        unit("xi_start", self.xi_start)?;
        unit("eta_start", self.eta_start)?;
        unit("eta_end", self.eta_end)?;
        if self.xi_start > self.eta_start {
            return Err(Error::invalid("xi_start", "must not exceed eta_start"));
        }
        if self.eta_end > self.eta_start {
            return Err(Error::invalid("eta_end", "must not exceed eta_start"));
        }
        if self.total_steps == 0 {
            return Err(Error::invalid("total_steps", "must be at least 1"));
        }
        Ok(())
    }

    /// Window `(xi, eta)` at `step`, interpolated linearly between
    /// `(xi_start, eta_start)` at 0 and `(0, eta_end)` at `total_steps`.
    pub fn thresholds_at(&self, step: u64) -> Result<(f64, f64)> {
        if step > self.total_steps {
            return Err(Error::invalid(
                "step",
                format!("{step} is past the last step {}", self.total_steps),
            ));
        }
        let f = step as f64 / self.total_steps as f64;
        let xi = self.xi_start * (1.0 - f);
        // Convex combination so both endpoints come out exact.
        let eta = (self.eta_start * (1.0 - f) + self.eta_end * f).max(xi);
        Ok((xi, eta))
    }
}

/// Anchors of one batch: positive ids, and negative ids with the model's
/// confidence in their negative label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorBatch {
    pub positive_ids: Vec<usize>,
    pub negative_ids: Vec<usize>,
    pub negative_confidences: Vec<f64>,
}

impl AnchorBatch {
    pub fn new(positive_ids: Vec<usize>, negative_ids: Vec<usize>, negative_confidences: Vec<f64>) -> Result<Self> {
        if negative_ids.len() != negative_confidences.len() {
            return Err(Error::invalid(
                "negative_confidences",
                format!(
                    "{} confidences for {} negatives",
                    negative_confidences.len(),
                    negative_ids.len()
                ),
            ));
        }
        if let Some(i) = negative_confidences.iter().position(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::invalid(
                format!("negative_confidences[{i}]"),
                "must lie in [0, 1]",
            ));
        }
        Ok(AnchorBatch {
            positive_ids,
            negative_ids,
            negative_confidences,
        })
    }

    /// Positives get ids `0..n_positive`, negatives follow in order.
    pub fn from_confidences(n_positive: usize, negative_confidences: Vec<f64>) -> Result<Self> {
        let negative_ids = (n_positive..n_positive + negative_confidences.len()).collect();
        Self::new((0..n_positive).collect(), negative_ids, negative_confidences)
    }
}

/// Negatives admitted for training, as positions into the batch's negative list.
///
/// In-window negatives are kept; beyond `max_ratio * |positives|` of them a
/// uniform subset is drawn. With nothing in the window the hardest
/// (lowest-confidence) negatives are taken instead. `None` disables the cap.
/// The cap is never below one anchor. Returned positions are ascending,
/// except for the fallback, which lists hardest first.
pub fn select_negatives<R: Rng + ?Sized>(
    batch: &AnchorBatch,
    xi: f64,
    eta: f64,
    max_ratio: Option<f64>,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if xi.is_nan() || eta.is_nan() || xi > eta {
        return Err(Error::invalid("xi", format!("window [{xi}, {eta}] is empty")));
    }
    if let Some(r) = max_ratio {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::invalid("max_ratio", format!("must be positive, got {r}")));
        }
    }
    let confs = &batch.negative_confidences;
    if confs.is_empty() {
        return Ok(Vec::new());
    }
    let cap = max_ratio.map(|r| ((r * batch.positive_ids.len() as f64).floor() as usize).max(1));

    let in_window: Vec<usize> = (0..confs.len())
        .filter(|&i| xi <= confs[i] && confs[i] <= eta)
        .collect();

    if in_window.is_empty() {
        let k = cap.unwrap_or_else(|| batch.positive_ids.len().max(1)).min(confs.len());
        let mut order: Vec<usize> = (0..confs.len()).collect();
        order.sort_by(|&a, &b| confs[a].total_cmp(&confs[b]).then(a.cmp(&b)));
        order.truncate(k);
        return Ok(order);
    }

    match cap {
        Some(k) if in_window.len() > k => {
            let mut picked: Vec<usize> = rand::seq::index::sample(rng, in_window.len(), k)
                .into_iter()
                .map(|j| in_window[j])
                .collect();
            picked.sort_unstable();
            Ok(picked)
        }
        _ => Ok(in_window),
    }
}

/// Ids to train on: every positive plus the selected negatives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingAnchors {
    pub positives: Vec<usize>,
    pub negatives: Vec<usize>,
}

impl TrainingAnchors {
    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.positives.iter().chain(&self.negatives).copied()
    }
}

/// Union of all positives with the negatives at positions `selected`.
pub fn assemble_training_anchors(batch: &AnchorBatch, selected: &[usize]) -> Result<TrainingAnchors> {
    let mut seen = HashSet::with_capacity(batch.positive_ids.len() + selected.len());
    for &id in &batch.positive_ids {
        if !seen.insert(id) {
            return Err(Error::invalid("positive_ids", format!("duplicate anchor id {id}")));
        }
    }
    let mut negatives = Vec::with_capacity(selected.len());
    for &pos in selected {
        let id = *batch.negative_ids.get(pos).ok_or(Error::UnknownIndex {
            kind: "negative anchor",
            index: pos,
            len: batch.negative_ids.len(),
        })?;
        if !seen.insert(id) {
            return Err(Error::invalid(
                "selected_negatives",
                format!("anchor id {id} appears twice"),
            ));
        }
        negatives.push(id);
    }
    Ok(TrainingAnchors {
        positives: batch.positive_ids.clone(),
        negatives,
    })
}

/// One row of the selection log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub step: u64,
    pub xi: f64,
    pub eta: f64,
    pub n_selected: usize,
    /// Mean confidence of the selected negatives, NaN when none were selected.
    pub mean_confidence: f64,
}

impl SelectionRecord {
    pub fn new(step: u64, xi: f64, eta: f64, batch: &AnchorBatch, selected: &[usize]) -> Self {
        let mean_confidence = if selected.is_empty() {
            f64::NAN
        } else {
            selected.iter().map(|&i| batch.negative_confidences[i]).sum::<f64>() / selected.len() as f64
        };
        SelectionRecord {
            step,
            xi,
            eta,
            n_selected: selected.len(),
            mean_confidence,
        }
    }
}
