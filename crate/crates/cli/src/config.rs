//! Flat TOML experiment configuration layered over a named preset.

use std::path::Path;

use anyhow::{bail, Context, Result};
use ndsim_core::analysis::{CaptureModel, MpskParams};
use ndsim_core::channel::{dbm_to_watts, ChannelParams, Fading, PowerLawModel};
use ndsim_core::setup::DetectionSetup;
use ndsim_core::signals::{DEFAULT_POLY, DEFAULT_REGISTER_LEN};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Reference plus two neighbors, `r^-4` law, no noise.
    ThreeNode,
    /// Eight nodes in a 1 km disk with thermal noise.
    Detection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Offset,
    Simplified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingKind {
    None,
    Rayleigh,
}

macro_rules! config_struct {
    ($($field:ident : $ty:ty),* $(,)?) => {
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct ExperimentConfig {
            pub preset: Preset,
            $(pub $field: $ty,)*
            #[serde(default, skip_serializing_if = "Option::is_none")]
            pub pattern_file: Option<String>,
        }

        #[derive(Debug, Default, Deserialize)]
        #[serde(deny_unknown_fields)]
        struct RawConfig {
            preset: Option<Preset>,
            $($field: Option<$ty>,)*
            pattern_file: Option<String>,
        }

        impl ExperimentConfig {
            fn overlay(mut self, raw: RawConfig) -> Self {
                $(if let Some(v) = raw.$field { self.$field = v; })*
                if raw.pattern_file.is_some() {
                    self.pattern_file = raw.pattern_file;
                }
                self
            }
        }
    };
}

config_struct! {
    tx_power_dbm: f64,
    path_loss_exponent: f64,
    law: Law,
    fading: FadingKind,
    noise_density_dbm_hz: f64,
    bandwidth_hz: f64,
    region_radius_m: f64,
    nodes: usize,
    p_t: f64,
    tau: f64,
    sinr_noise: bool,
    slots: usize,
    early_stop_window: usize,
    strips: usize,
    register_len: u32,
    poly: u32,
    discovery_radius_m: f64,
    seed: u64,
    trials: usize,
    mpsk_target_ber: f64,
    mpsk_bits_per_slot: f64,
    mpsk_bandwidth_hz: f64,
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        let common = Self {
            preset,
            tx_power_dbm: 30.0,
            path_loss_exponent: 4.0,
            law: Law::Simplified,
            fading: FadingKind::None,
            noise_density_dbm_hz: f64::NEG_INFINITY,
            bandwidth_hz: 1.0,
            region_radius_m: 1.0,
            nodes: 2,
            p_t: 0.4226,
            tau: 1.0,
            sinr_noise: false,
            slots: 15,
            early_stop_window: 0,
            strips: 7,
            register_len: DEFAULT_REGISTER_LEN,
            poly: DEFAULT_POLY,
            discovery_radius_m: 1.0,
            seed: 1,
            trials: 1000,
            mpsk_target_ber: 1e-6,
            mpsk_bits_per_slot: 1.0,
            mpsk_bandwidth_hz: 1.0,
            pattern_file: None,
        };
        match preset {
            Preset::ThreeNode => common,
            Preset::Detection => Self {
                tx_power_dbm: -24.0,
                law: Law::Offset,
                noise_density_dbm_hz: -173.0,
                bandwidth_hz: 100.0,
                region_radius_m: 1000.0,
                nodes: 8,
                p_t: 0.5,
                sinr_noise: true,
                slots: 20,
                discovery_radius_m: 1000.0,
                trials: 100,
                ..common
            },
        }
    }

    /// Parses `text`, starting from its `preset` (or `fallback`).
    pub fn parse(text: &str, fallback: Preset) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).context("invalid configuration")?;
        Ok(Self::preset(raw.preset.unwrap_or(fallback)).overlay(raw))
    }

    pub fn load(path: &Path, fallback: Preset) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text, fallback).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn tx_power_w(&self) -> f64 {
        dbm_to_watts(self.tx_power_dbm)
    }

    pub fn noise_density_w_hz(&self) -> f64 {
        dbm_to_watts(self.noise_density_dbm_hz)
    }

    pub fn channel(&self) -> Result<ChannelParams> {
        let law = match self.law {
            Law::Offset => PowerLawModel::Offset,
            Law::Simplified => PowerLawModel::Simplified,
        };
        let fading = match self.fading {
            FadingKind::None => Fading::None,
            FadingKind::Rayleigh => Fading::Rayleigh,
        };
        Ok(ChannelParams::new(
            self.tx_power_w(),
            self.path_loss_exponent,
            fading,
            law,
            self.noise_density_w_hz(),
            self.bandwidth_hz,
        )?)
    }

    pub fn capture_model(&self) -> Result<CaptureModel> {
        Ok(CaptureModel::from_channel(
            &self.channel()?,
            self.region_radius_m,
            self.sinr_noise,
        ))
    }

    pub fn mpsk(&self, m: u32) -> Result<MpskParams> {
        let p = MpskParams {
            m,
            target_ber_z: self.mpsk_target_ber,
            w_bits: self.mpsk_bits_per_slot,
            bandwidth_hz: self.mpsk_bandwidth_hz,
            k_g: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn detection_setup(&self) -> Result<DetectionSetup> {
        if self.slots == 0 {
            bail!("slots must be at least 1");
        }
        Ok(DetectionSetup {
            channel: self.channel()?,
            region_radius_m: self.region_radius_m,
            nodes: self.nodes,
            p_t: self.p_t,
            slots: self.slots,
            strips: self.strips,
            register_len: self.register_len,
            poly: self.poly,
        })
    }

    pub fn early_stop(&self) -> Option<usize> {
        (self.early_stop_window > 0).then_some(self.early_stop_window)
    }
}
