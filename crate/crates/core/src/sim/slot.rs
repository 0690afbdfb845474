use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::pattern::Role;
use crate::channel::{amplitude, sample_fading, success_set, ChannelParams, Fading};
use crate::deployment::Deployment;
use crate::error::{invalid, Result};
use crate::rfs::NodeSet;
use crate::rng::{derive, stream_rng, Stream};
use crate::signals::{synthesize, ReceivedVector, Signature};

/// Per-slot protocol and channel settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotConfig {
    pub channel: ChannelParams,
    pub p_t: f64,
    pub tau: f64,
    /// Include receiver noise in the SINR denominator.
    pub sinr_noise: bool,
    /// Keep the reference in listen mode every slot.
    pub reference_listens: bool,
    /// Chip signatures for ids `1..=K`; empty disables synthesis.
    pub signatures: Vec<Signature>,
}

impl SlotConfig {
    /// Noise-free capture-only setup.
    pub fn protocol(channel: ChannelParams, p_t: f64, tau: f64) -> Self {
        Self {
            channel,
            p_t,
            tau,
            sinr_noise: false,
            reference_listens: false,
            signatures: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        if !(0.0..=1.0).contains(&self.p_t) {
            return Err(invalid("p_t", format!("must be in [0, 1], got {}", self.p_t)));
        }
        if !(self.tau > 0.0) {
            return Err(invalid("tau", format!("must be positive, got {}", self.tau)));
        }
        Ok(())
    }
}

/// Everything that happened at the reference node in one slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRealization {
    pub slot_index: usize,
    /// Roles indexed by deployment index.
    pub roles: Vec<Role>,
    /// Transmitting neighbors while the reference listens.
    pub truth_tx_set: NodeSet,
    pub amplitudes: BTreeMap<u32, Complex64>,
    pub powers: BTreeMap<u32, f64>,
    #[serde(skip)]
    pub received: Option<ReceivedVector>,
    pub success_set: NodeSet,
}

impl SlotRealization {
    pub fn reference_listens(&self) -> bool {
        self.roles[0] == Role::Listen
    }
}

/// One slot with roles drawn independently per node.
pub fn run_slot(deployment: &Deployment, cfg: &SlotConfig, seed: u64, slot_index: usize) -> Result<SlotRealization> {
    cfg.validate()?;
    let mut rng = stream_rng(seed, Stream::Roles, slot_index as u64);
    let mut roles: Vec<Role> = (0..=deployment.neighbor_count())
        .map(|_| {
            if rng.random::<f64>() < cfg.p_t {
                Role::Transmit
            } else {
                Role::Listen
            }
        })
        .collect();
    if cfg.reference_listens {
        roles[0] = Role::Listen;
    }
    realize(deployment, cfg, roles, seed, slot_index)
}

/// One slot with scripted roles.
pub fn run_slot_with_roles(
    deployment: &Deployment,
    cfg: &SlotConfig,
    roles: &[Role],
    seed: u64,
    slot_index: usize,
) -> Result<SlotRealization> {
    cfg.validate()?;
    if roles.len() != deployment.neighbor_count() + 1 {
        return Err(invalid(
            "roles",
            format!("{} roles for {} nodes", roles.len(), deployment.neighbor_count() + 1),
        ));
    }
    realize(deployment, cfg, roles.to_vec(), seed, slot_index)
}

fn realize(
    deployment: &Deployment,
    cfg: &SlotConfig,
    roles: Vec<Role>,
    seed: u64,
    slot_index: usize,
) -> Result<SlotRealization> {
    let k = deployment.neighbor_count();
    let mut fading_rng = stream_rng(seed, Stream::Fading, slot_index as u64);
    let draws: Vec<Option<Complex64>> = (0..k)
        .map(|_| match cfg.channel.fading {
            Fading::None => None,
            Fading::Rayleigh => Some(sample_fading(&mut fading_rng)),
        })
        .collect();
    let mut truth = NodeSet::EMPTY;
    let mut amplitudes = BTreeMap::new();
    let mut powers = BTreeMap::new();
    let listening = roles[0] == Role::Listen;
    if listening {
        for i in 1..=k {
            if roles[i] != Role::Transmit {
                continue;
            }
            let id = i as u32;
            let draw = draws[i - 1];
            let d = deployment.distance(i);
            truth.insert(id);
            amplitudes.insert(id, amplitude(d, &cfg.channel, draw)?);
            let fade = draw.map_or(1.0, |psi| psi.norm_sqr());
            powers.insert(id, cfg.channel.mean_power_at(d) * fade);
        }
    }
    let noise = if cfg.sinr_noise { cfg.channel.noise_power() } else { 0.0 };
    let listed: Vec<(u32, f64)> = powers.iter().map(|(&id, &p)| (id, p)).collect();
    let success = success_set(&listed, noise, cfg.tau);
    let received = if listening && !cfg.signatures.is_empty() {
        Some(synthesize(
            truth,
            &amplitudes,
            &cfg.signatures,
            cfg.channel.noise_power(),
            cfg.channel.fading,
            derive(seed, Stream::Noise, slot_index as u64),
        )?)
    } else {
        None
    };
    Ok(SlotRealization {
        slot_index,
        roles,
        truth_tx_set: truth,
        amplitudes,
        powers,
        received,
        success_set: success,
    })
}
