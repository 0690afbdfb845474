//! Slotted discovery protocol driven over a deployment.
//!
//! Node ids are deployment indices: the reference sits at index 0 and its
//! neighbors carry ids `1..=K`.

mod discovery;
mod pattern;
mod replicate;
mod slot;

pub use discovery::{
    run_discovery, DetectionReport, Detector, DiscoveryConfig, DiscoveryState, DiscoveryTrace, SlotRecord,
};
pub use pattern::{Role, RolePattern, EXAMPLE_PATTERN_CSV};
pub use replicate::{replicate, trial_seed, ReplicateSummary, Scenario};
pub use slot::{run_slot, run_slot_with_roles, SlotConfig, SlotRealization};
