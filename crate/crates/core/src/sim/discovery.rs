use serde::{Deserialize, Serialize};

use super::pattern::RolePattern;
use super::slot::{run_slot, run_slot_with_roles, SlotConfig, SlotRealization};
use crate::deployment::Deployment;
use crate::detect::{
    classify_outcomes, matched_filter_decide, rst_map_decide, MatchedFilterConfig, Outcome, RstDetectorConfig, Tally,
};
use crate::error::{invalid, Result};
use crate::rfs::NodeSet;

/// How the reference decides which neighbors it heard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Detector {
    /// The SINR success set itself.
    Oracle,
    MatchedFilter(MatchedFilterConfig),
    Rst(RstDetectorConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryConfig {
    pub slot: SlotConfig,
    pub max_slots: usize,
    /// Stop after this many consecutive slots without a new neighbor;
    /// `None` never stops early.
    pub early_stop_window: Option<usize>,
    /// Scripted roles replacing the random draws.
    pub pattern: Option<RolePattern>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscoveryState {
    pub discovered: NodeSet,
    /// 1-based slot of the latest new discovery.
    pub last_new_discovery_slot: Option<usize>,
    pub terminated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub realization: SlotRealization,
    /// Detector output; `None` when the reference transmitted.
    pub decided: Option<NodeSet>,
    pub state: DiscoveryState,
    pub fraction_discovered: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    /// Per-slot outcomes over every neighbor; `None` for transmit slots.
    pub outcomes: Vec<Option<Vec<(u32, Outcome)>>>,
    pub tally: Tally,
}

impl DetectionReport {
    /// Rows are nodes, columns are slots, `-` where no decision was made.
    pub fn grid_csv(&self, universe: NodeSet) -> String {
        let mut out = String::from("node");
        for t in 1..=self.outcomes.len() {
            out.push_str(&format!(",slot{t}"));
        }
        out.push('\n');
        for id in universe.iter() {
            out.push_str(&id.to_string());
            for slot in &self.outcomes {
                out.push(',');
                let letter = slot
                    .as_ref()
                    .and_then(|v| v.iter().find(|(n, _)| *n == id))
                    .map_or('-', |(_, o)| o.letter());
                out.push(letter);
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryTrace {
    pub records: Vec<SlotRecord>,
    /// Present for matched-filter and RST detectors.
    pub report: Option<DetectionReport>,
}

impl DiscoveryTrace {
    pub fn final_state(&self) -> DiscoveryState {
        self.records.last().map(|r| r.state).unwrap_or_default()
    }
}

/// Runs slots until `max_slots`, the end of a scripted pattern, or the
/// early-stop window expires.
pub fn run_discovery(
    deployment: &Deployment,
    cfg: &DiscoveryConfig,
    detector: &Detector,
    seed: u64,
) -> Result<DiscoveryTrace> {
    if cfg.max_slots == 0 {
        return Err(invalid("max_slots", "must be at least 1"));
    }
    if cfg.early_stop_window == Some(0) {
        return Err(invalid("early_stop_window", "must be at least 1"));
    }
    let k = deployment.neighbor_count();
    let slots = match &cfg.pattern {
        Some(p) => {
            if p.node_count() != k + 1 {
                return Err(invalid(
                    "pattern",
                    format!("{} rows for {} nodes", p.node_count(), k + 1),
                ));
            }
            cfg.max_slots.min(p.slots())
        }
        None => cfg.max_slots,
    };
    let universe = NodeSet::universe(k);
    let out_of_range = match detector {
        Detector::Rst(r) => (1..=k)
            .filter(|&i| deployment.distance(i) > r.discovery_radius)
            .map(|i| i as u32)
            .collect(),
        _ => NodeSet::EMPTY,
    };
    let mut report = match detector {
        Detector::Oracle => None,
        _ => Some(DetectionReport::default()),
    };
    let mut state = DiscoveryState::default();
    let mut records = Vec::with_capacity(slots);
    for t in 0..slots {
        let realization = match &cfg.pattern {
            Some(p) => run_slot_with_roles(deployment, &cfg.slot, &p.roles_at(t), seed, t)?,
            None => run_slot(deployment, &cfg.slot, seed, t)?,
        };
        let decided = if realization.reference_listens() {
            Some(match detector {
                Detector::Oracle => realization.success_set,
                Detector::MatchedFilter(mf) => {
                    let y = received(&realization)?;
                    matched_filter_decide(y, &cfg.slot.signatures, mf)?.detected_set
                }
                Detector::Rst(rst) => {
                    let y = received(&realization)?;
                    rst_map_decide(y, rst, cfg.slot.channel.noise_power())?.detected_set
                }
            })
        } else {
            None
        };
        if let Some(rep) = report.as_mut() {
            let outcomes = decided
                .map(|d| classify_outcomes(realization.truth_tx_set, d.intersection(universe), universe))
                .transpose()?;
            if let Some(o) = &outcomes {
                rep.tally.add(o, out_of_range);
            }
            rep.outcomes.push(outcomes);
        }
        let slot_no = t + 1;
        if let Some(d) = decided {
            let new = d.intersection(universe).difference(state.discovered);
            if !new.is_empty() {
                state.discovered = state.discovered.union(new);
                state.last_new_discovery_slot = Some(slot_no);
            }
        }
        if let Some(w) = cfg.early_stop_window {
            if slot_no - state.last_new_discovery_slot.unwrap_or(0) >= w {
                state.terminated = true;
            }
        }
        let fraction = if k == 0 {
            0.0
        } else {
            state.discovered.len() as f64 / k as f64
        };
        records.push(SlotRecord {
            realization,
            decided,
            state,
            fraction_discovered: fraction,
        });
        if state.terminated {
            break;
        }
    }
    Ok(DiscoveryTrace { records, report })
}

fn received(r: &SlotRealization) -> Result<&crate::signals::ReceivedVector> {
    r.received
        .as_ref()
        .ok_or_else(|| invalid("signatures", "detector needs synthesized chips; configure signatures"))
}
