use serde::{Deserialize, Serialize};

use super::Decision;
use crate::error::{invalid, Result};
use crate::rfs::NodeSet;
use crate::signals::{ReceivedVector, Signature};
use crate::stats::choose;

/// Noise plus mean multiple-access interference seen by one correlator:
/// `N + Σ_n C(J̄-1,n) p^n (1-p)^{J̄-1-n} · n · P̄_rx`.
pub fn effective_noise(j_bar: usize, p_t: f64, mean_rx_power: f64, noise: f64) -> Result<f64> {
    if j_bar == 0 {
        return Err(invalid("j_bar", "mean neighbor count must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p_t) {
        return Err(invalid("p_t", format!("must be in [0, 1], got {p_t}")));
    }
    let m = j_bar as i64 - 1;
    let mai: f64 = (1..=m)
        .map(|n| choose(m, n) * p_t.powi(n as i32) * (1.0 - p_t).powi((m - n) as i32) * n as f64)
        .sum();
    Ok(noise + mai * mean_rx_power)
}

/// Matched-filter bank threshold `β' = β·N'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedFilterConfig {
    pub effective_noise: f64,
    pub beta: f64,
}

impl MatchedFilterConfig {
    pub fn new(effective_noise: f64, beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(invalid("beta", format!("must be positive, got {beta}")));
        }
        if !(effective_noise >= 0.0) {
            return Err(invalid("effective_noise", "must be non-negative"));
        }
        Ok(Self { effective_noise, beta })
    }

    /// Minimum-probability-of-error threshold `β = (1-p)/p`.
    pub fn min_error(effective_noise: f64, p_t: f64) -> Result<Self> {
        if !(p_t > 0.0 && p_t < 1.0) {
            return Err(invalid("p_t", format!("must be in (0, 1), got {p_t}")));
        }
        Self::new(effective_noise, (1.0 - p_t) / p_t)
    }

    pub fn threshold(&self) -> f64 {
        self.beta * self.effective_noise
    }
}

/// Declares node `k` present when `Re⟨y, s_k⟩ ≥ β'`.
pub fn matched_filter_decide(
    y: &ReceivedVector,
    signatures: &[Signature],
    cfg: &MatchedFilterConfig,
) -> Result<Decision> {
    let threshold = cfg.threshold();
    let mut detected = NodeSet::EMPTY;
    let mut scores = std::collections::BTreeMap::new();
    for s in signatures {
        if s.len() != y.len() {
            return Err(invalid(
                "signatures",
                format!(
                    "node {} has {} chips, received vector has {}",
                    s.node_id,
                    s.len(),
                    y.len()
                ),
            ));
        }
        let v = y.correlate(s);
        if v >= threshold {
            detected.insert(s.node_id);
        }
        scores.insert(s.node_id, v);
    }
    Ok(Decision {
        detected_set: detected,
        estimated_j: None,
        per_node_scores: scores,
    })
}
