//! Replayable log of registry mutations, one JSON object per line.
//!
//! ```text
//! {"op":"next_epoch","seed":17}
//! {"op":"report_losses","pairs":[[3,0.52],[7,0.1]]}
//! ```

use serde::{Deserialize, Serialize};

use super::registry::SamplerRegistry;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Operation {
    NextEpoch { seed: u64 },
    ReportLosses { pairs: Vec<(usize, f64)> },
}

impl Operation {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("operation serializes")
    }
}

/// Parses a JSON-lines log; blank lines are skipped.
pub fn parse_log(text: &str) -> Result<Vec<Operation>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::invalid(format!("log line {}", i + 1), e.to_string())))
        .collect()
}

pub fn format_log(ops: &[Operation]) -> String {
    ops.iter().map(|op| op.to_line() + "\n").collect()
}

impl SamplerRegistry {
    /// Applies one logged operation, returning the batches of a `next_epoch`.
    pub fn apply(&mut self, op: &Operation) -> Result<Option<Vec<Vec<usize>>>> {
        match op {
            Operation::NextEpoch { seed } => self.next_epoch_seeded(*seed).map(Some),
            Operation::ReportLosses { pairs } => self.report_losses(pairs).map(|_| None),
        }
    }

    pub fn replay(&mut self, ops: &[Operation]) -> Result<()> {
        for (i, op) in ops.iter().enumerate() {
            self.apply(op)
                .map_err(|e| Error::invalid(format!("log entry {}", i + 1), e.to_string()))?;
        }
        Ok(())
    }
}
