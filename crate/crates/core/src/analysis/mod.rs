//! Throughput analysis of the slotted discovery protocol under SINR capture.
//!
//! Noise is neglected unless a [`CaptureModel`] carries a non-zero noise
//! power, in which case every capture probability falls back to Monte Carlo.

mod capture;
mod mpsk;
mod prediction;

pub use capture::{
    capture_prob, capture_table, expected_successes_from_table, expected_successes_per_slot, f1n, f2n, optimal_pt,
    optimal_pt_numeric, three_node_expected_successes, CaptureContext, CaptureModel, McConfig,
};
pub use mpsk::{max_successes_per_second, mpsk_symbol_rate, q_function, q_inverse, slot_duration, MpskParams};
pub use prediction::{
    bernoulli_prediction, conditional_membership, correlated_terms, slot_basis_curve, slot_basis_prediction,
    three_node_membership_closed_form, CorrelatedTerms,
};
