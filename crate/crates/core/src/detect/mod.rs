//! Per-slot detection of the transmitting neighbor set from chip samples.

mod mf;
mod outcome;
mod rst;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::rfs::NodeSet;

pub use mf::{effective_noise, matched_filter_decide, MatchedFilterConfig};
pub use outcome::{classify_outcomes, Outcome, Tally};
pub use rst::{
    equal_area_radii, rst_gaussian_likelihood, rst_log_likelihood, rst_log_marginal_likelihood, rst_map_decide,
    rst_marginal_likelihood, rst_objective, RstDetectorConfig, DEFAULT_ENUMERATION_CAP,
};

/// Output of a detector for one slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub detected_set: NodeSet,
    /// Estimated neighbor count (RST only).
    pub estimated_j: Option<usize>,
    /// Correlator outputs (matched filter only).
    pub per_node_scores: BTreeMap<u32, f64>,
}
