use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::discovery::{run_discovery, Detector, DiscoveryConfig, DiscoveryTrace};
use crate::deployment::{sample_uniform_disk, Deployment, DiskRegion};
use crate::detect::Tally;
use crate::error::{invalid, Result};
use crate::rng::{derive, Stream};
use crate::stats::Estimate;

/// Source of the deployment used by each trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Scenario {
    Fixed(Deployment),
    /// Fresh uniform placement of `neighbors` nodes per trial.
    Uniform {
        neighbors: usize,
        radius_m: f64,
    },
}

impl Scenario {
    pub fn deployment(&self, base_seed: u64, trial: usize) -> Result<Deployment> {
        match self {
            Scenario::Fixed(d) => Ok(d.clone()),
            Scenario::Uniform { neighbors, radius_m } => Ok(sample_uniform_disk(
                *neighbors,
                DiskRegion::new(*radius_m)?,
                derive(base_seed, Stream::Deployment, trial as u64),
            )),
        }
    }
}

/// Seed of trial `trial` under `base_seed`.
pub fn trial_seed(base_seed: u64, trial: usize) -> u64 {
    derive(base_seed, Stream::Trial, trial as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateSummary {
    pub trials: usize,
    /// Trial mean of the per-slot success count at the reference.
    pub successes_per_slot: Estimate,
    /// Successes at slot `t` across trials (trials that stopped early count zero).
    pub successes_by_slot: Vec<Estimate>,
    /// Fraction discovered after slot `t`, carried forward past early stops.
    pub fraction_by_slot: Vec<Estimate>,
    /// Detector tallies per trial, in trial order.
    pub tallies: Vec<Tally>,
}

/// Independent seeded trials, aggregated in trial order.
pub fn replicate(
    scenario: &Scenario,
    cfg: &DiscoveryConfig,
    detector: &Detector,
    trials: usize,
    base_seed: u64,
) -> Result<ReplicateSummary> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    let traces: Vec<DiscoveryTrace> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let dep = scenario.deployment(base_seed, i)?;
            run_discovery(&dep, cfg, detector, trial_seed(base_seed, i))
        })
        .collect::<Result<_>>()?;
    let slots = traces.iter().map(|t| t.records.len()).max().unwrap_or(0);
    let per_trial: Vec<f64> = traces
        .iter()
        .map(|t| {
            let n = t.records.len().max(1) as f64;
            t.records
                .iter()
                .map(|r| r.realization.success_set.len() as f64)
                .sum::<f64>()
                / n
        })
        .collect();
    let column = |f: &dyn Fn(&DiscoveryTrace, usize) -> f64| -> Vec<Estimate> {
        (0..slots)
            .map(|s| Estimate::from_samples(&traces.iter().map(|t| f(t, s)).collect::<Vec<_>>()))
            .collect()
    };
    let successes_by_slot = column(&|t, s| t.records.get(s).map_or(0.0, |r| r.realization.success_set.len() as f64));
    let fraction_by_slot = column(&|t, s| {
        t.records
            .get(s)
            .or(t.records.last())
            .map_or(0.0, |r| r.fraction_discovered)
    });
    Ok(ReplicateSummary {
        trials,
        successes_per_slot: Estimate::from_samples(&per_trial),
        successes_by_slot,
        fraction_by_slot,
        tallies: traces
            .iter()
            .map(|t| t.report.as_ref().map(|r| r.tally).unwrap_or_default())
            .collect(),
    })
}
