use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Loss window and visit count of one training sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleState {
    pub id: usize,
    #[serde(rename = "losses")]
    recent_losses: VecDeque<f64>,
    #[serde(rename = "visits")]
    visit_count: u64,
}

impl SampleState {
    pub fn new(id: usize) -> Self {
        SampleState {
            id,
            recent_losses: VecDeque::new(),
            visit_count: 0,
        }
    }

    /// Rebuilds a state from stored parts, checking the invariants against
    /// `window`.
    pub fn from_parts(id: usize, losses: Vec<f64>, visits: u64, window: usize) -> Result<Self> {
        if losses.len() > window {
            return Err(Error::invalid(
                format!("states[{id}].losses"),
                format!("holds {} values, window is {window}", losses.len()),
            ));
        }
        if (losses.len() as u64) > visits {
            return Err(Error::invalid(
                format!("states[{id}].visits"),
                format!("{visits} visits but {} stored losses", losses.len()),
            ));
        }
        if visits > 0 && losses.is_empty() {
            return Err(Error::invalid(
                format!("states[{id}].losses"),
                "visited sample without losses",
            ));
        }
        for &l in &losses {
            check_loss(l)?;
        }
        Ok(SampleState {
            id,
            recent_losses: losses.into(),
            visit_count: visits,
        })
    }

    pub fn recent_losses(&self) -> &VecDeque<f64> {
        &self.recent_losses
    }

    pub fn visit_count(&self) -> u64 {
        self.visit_count
    }

    pub fn last_loss(&self) -> Option<f64> {
        self.recent_losses.back().copied()
    }

    /// Mean of the stored window, `None` before the first visit.
    pub fn mean_loss(&self) -> Option<f64> {
        if self.recent_losses.is_empty() {
            None
        } else {
            Some(self.recent_losses.iter().sum::<f64>() / self.recent_losses.len() as f64)
        }
    }

    /// Appends `loss`, evicting the oldest value once the window holds `window`
    /// values.
    pub fn record(&mut self, loss: f64, window: usize) -> Result<()> {
        check_loss(loss)?;
        debug_assert!(window >= 1);
        while self.recent_losses.len() >= window {
            self.recent_losses.pop_front();
        }
        self.recent_losses.push_back(loss);
        self.visit_count += 1;
        Ok(())
    }
}

pub(crate) fn check_loss(loss: f64) -> Result<()> {
    if loss.is_finite() && loss >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("loss", format!("must be finite and >= 0, got {loss}")))
    }
}

/// Priority of a sample before rescaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Visited(f64),
    /// Never visited; stands in for the largest finite weight of the cohort.
    Unvisited,
}

impl Weight {
    pub fn finite(self) -> Option<f64> {
        match self {
            Weight::Visited(w) => Some(w),
            Weight::Unvisited => None,
        }
    }
}

/// `mean(recent losses) + alpha / sqrt(visits)`.
pub fn weight(state: &SampleState, alpha: f64) -> Weight {
    match state.mean_loss() {
        Some(mean) => Weight::Visited(mean + alpha / (state.visit_count as f64).sqrt()),
        None => Weight::Unvisited,
    }
}
