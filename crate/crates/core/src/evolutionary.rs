//! Evolutionary centrality: score each slot on a blend of its own adjacency
//! and the previous slot's, `(1 - alpha) * A_t + alpha * A_{t-1}`.
//!
//! The blend always uses the raw previous adjacency, never the previously
//! smoothed one, so history reaches back exactly one slot. The first slot
//! has no history and passes through unchanged.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::{self, CentralityMeasure, CentralityResult, MeasureParams};
use crate::error::{Error, Result};
use crate::graph::SlotGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    alpha: f64,
}

impl SmoothingConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidConfig(format!(
                "alpha {alpha} must lie in [0, 1]"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self { alpha: 0.5 }
    }
}

/// Blends `current` with `previous`. Without a previous slot the current
/// graph is returned as is.
pub fn smooth_adjacency(
    current: &SlotGraph,
    previous: Option<&SlotGraph>,
    cfg: &SmoothingConfig,
) -> Result<SlotGraph> {
    let Some(previous) = previous else {
        return Ok(current.clone());
    };
    if previous.n() != current.n() {
        return Err(Error::ShapeMismatch {
            expected: current.n(),
            found: previous.n(),
        });
    }
    if previous.registry != current.registry {
        return Err(Error::InvalidConfig(
            "slots do not share a node registry".into(),
        ));
    }
    let alpha = cfg.alpha;
    let keep = 1.0 - alpha;
    let adjacency = current
        .adjacency
        .map_pairwise(&previous.adjacency, |now, before| {
            keep * now + alpha * before
        });
    Ok(SlotGraph {
        slot: current.slot,
        adjacency,
        registry: current.registry.clone(),
    })
}

/// Smooths every slot against its predecessor, then scores it. Slots must
/// be ordered and consecutive. Results align with the input.
pub fn evolutionary_centrality(
    slots: &[SlotGraph],
    measure: CentralityMeasure,
    cfg: &SmoothingConfig,
    params: &MeasureParams,
) -> Result<Vec<CentralityResult>> {
    if slots.is_empty() {
        return Err(Error::InvalidConfig("no slots to score".into()));
    }
    for pair in slots.windows(2) {
        if pair[1].slot != pair[0].slot + 1 {
            return Err(Error::NonConsecutiveSlots {
                expected: pair[0].slot + 1,
                found: pair[1].slot,
            });
        }
    }
    let results: Vec<Result<CentralityResult>> = (0..slots.len())
        .into_par_iter()
        .map(|t| {
            let previous = t.checked_sub(1).map(|p| &slots[p]);
            let smoothed = smooth_adjacency(&slots[t], previous, cfg)?;
            let mut result = centrality::compute(&smoothed, measure, params)?;
            result.alpha = Some(cfg.alpha);
            Ok(result)
        })
        .collect();
    // First error in slot order, whatever order the workers finished in.
    results.into_iter().collect()
}
