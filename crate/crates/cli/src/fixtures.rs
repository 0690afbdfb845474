//! Fixed eight-node deployments for the `detect` command.
//!
//! The committed JSON files are reconstructions: uniform placements in a
//! 1 km disk drawn from seeds hashed from the fixture names. They are not
//! measured layouts.

use anyhow::{bail, Result};
use ndsim_core::deployment::{sample_uniform_disk, Deployment, DiskRegion};

use crate::DetectScenario;

pub const FIXTURE_NODES: usize = 8;
pub const FIXTURE_RADIUS_M: f64 = 1000.0;

const DEPLOY1: &str = include_str!("../fixtures/deploy1.json");
const DEPLOY2: &str = include_str!("../fixtures/deploy2.json");

/// FNV-1a of the fixture name.
pub fn fixture_seed(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn name(scenario: DetectScenario) -> Result<&'static str> {
    match scenario {
        DetectScenario::Deploy1 => Ok("deploy1"),
        DetectScenario::Deploy2 => Ok("deploy2"),
        DetectScenario::Random => bail!("the random scenario has no fixture"),
    }
}

pub fn generate(scenario: DetectScenario) -> Result<Deployment> {
    let seed = fixture_seed(name(scenario)?);
    Ok(sample_uniform_disk(
        FIXTURE_NODES,
        DiskRegion::new(FIXTURE_RADIUS_M)?,
        seed,
    ))
}

pub fn load(scenario: DetectScenario) -> Result<Deployment> {
    let text = match scenario {
        DetectScenario::Deploy1 => DEPLOY1,
        DetectScenario::Deploy2 => DEPLOY2,
        DetectScenario::Random => bail!("the random scenario has no fixture"),
    };
    Ok(Deployment::from_json(text)?)
}
