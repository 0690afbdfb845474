//! Slotted neighbor discovery under an SINR multipacket-reception channel.
//!
//! The crate is organised bottom-up:
//!
//! - [`deployment`]: node placement in a disk and the distance law.
//! - [`channel`]: path loss, fading, received-power distribution, SINR capture.
//! - [`signals`]: m-sequence signatures and chip-level received vectors.
//! - [`analysis`]: closed-form and Monte Carlo throughput results, optimal
//!   transmit probability, M-PSK rate normalisation and multi-slot prediction.
//! - [`rfs`]: finite random-set statistics (belief mass, Möbius inversion).
//! - [`detect`]: matched-filter bank and random-set MAP detectors.
//! - [`sim`]: the slot-by-slot discovery protocol and replication driver.

// `!(x > 0.0)` guards deliberately reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod deployment;
pub mod detect;
mod error;
pub mod quad;
pub mod rfs;
pub mod rng;
pub mod setup;
pub mod signals;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
pub use rfs::NodeSet;
