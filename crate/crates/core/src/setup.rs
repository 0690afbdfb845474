//! The reference detection experiment: eight nodes uniform in a 1 km disk,
//! 15-chip signatures, a MICAz-class transmitter and thermal noise over
//! 100 Hz, with the reference listening every slot.

use serde::{Deserialize, Serialize};

use crate::channel::{dbm_to_watts, mean_rx_power, ChannelParams, Fading, PowerLawModel};
use crate::deployment::DiskRegion;
use crate::detect::{effective_noise, MatchedFilterConfig, RstDetectorConfig};
use crate::error::Result;
use crate::signals::{assign_signatures, Signature, DEFAULT_POLY, DEFAULT_REGISTER_LEN};
use crate::sim::{DiscoveryConfig, SlotConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionSetup {
    pub channel: ChannelParams,
    pub region_radius_m: f64,
    pub nodes: usize,
    pub p_t: f64,
    pub slots: usize,
    pub strips: usize,
    pub register_len: u32,
    pub poly: u32,
}

impl Default for DetectionSetup {
    fn default() -> Self {
        Self {
            channel: ChannelParams {
                tx_power_w: dbm_to_watts(-24.0),
                path_loss_exponent: 4.0,
                fading: Fading::None,
                law: PowerLawModel::Offset,
                noise_density_w_hz: dbm_to_watts(-173.0),
                bandwidth_hz: 100.0,
            },
            region_radius_m: 1000.0,
            nodes: 8,
            p_t: 0.5,
            slots: 20,
            strips: 7,
            register_len: DEFAULT_REGISTER_LEN,
            poly: DEFAULT_POLY,
        }
    }
}

impl DetectionSetup {
    pub fn signatures(&self) -> Result<Vec<Signature>> {
        assign_signatures(self.nodes, self.register_len, self.poly)
    }

    pub fn region(&self) -> Result<DiskRegion> {
        DiskRegion::new(self.region_radius_m)
    }

    pub fn mean_rx_power(&self) -> Result<f64> {
        mean_rx_power(&self.channel, self.region()?)
    }

    /// `N'` with the mean neighbor count equal to the node count.
    pub fn effective_noise(&self) -> Result<f64> {
        effective_noise(self.nodes, self.p_t, self.mean_rx_power()?, self.channel.noise_power())
    }

    pub fn matched_filter(&self) -> Result<MatchedFilterConfig> {
        MatchedFilterConfig::min_error(self.effective_noise()?, self.p_t)
    }

    pub fn rst(&self, discovery_radius_m: f64) -> Result<RstDetectorConfig> {
        RstDetectorConfig::equal_area(
            &self.channel,
            discovery_radius_m,
            self.region_radius_m,
            self.strips,
            self.p_t,
            self.signatures()?,
        )
    }

    pub fn discovery(&self) -> Result<DiscoveryConfig> {
        Ok(DiscoveryConfig {
            slot: SlotConfig {
                channel: self.channel,
                p_t: self.p_t,
                tau: 1.0,
                sinr_noise: true,
                reference_listens: true,
                signatures: self.signatures()?,
            },
            max_slots: self.slots,
            early_stop_window: None,
            pattern: None,
        })
    }
}
