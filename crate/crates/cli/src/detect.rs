//! Matched filter and RST detection on identical slot realizations.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use ndsim_core::detect::Tally;
use ndsim_core::sim::{replicate, run_discovery, trial_seed, Detector, DiscoveryConfig, Scenario};
use ndsim_core::stats::{paired_t_less, Estimate};
use ndsim_core::NodeSet;
use serde_json::json;

use crate::{fixtures, DetectScenario, DetectorKind, Run};

fn tally_json(tallies: &[Tally]) -> serde_json::Value {
    let mut total = Tally::default();
    tallies.iter().for_each(|t| total.merge(t));
    let mean = |f: fn(&Tally) -> u64| Estimate::from_samples(&tallies.iter().map(|t| f(t) as f64).collect::<Vec<_>>());
    json!({
        "total": total,
        "mean_errors": mean(Tally::errors),
        "mean_false_alarms": mean(|t| t.false_alarms),
        "mean_misses": mean(|t| t.misses),
    })
}

/// Replications default to one for the fixed deployments; `trials`
/// overrides.
pub fn run(run: &Run, scenario: DetectScenario, trials: Option<usize>) -> Result<()> {
    let c = &run.config;
    let setup = c.detection_setup()?;
    let source = match scenario {
        DetectScenario::Random => Scenario::Uniform {
            neighbors: c.nodes,
            radius_m: c.region_radius_m,
        },
        fixed => {
            let dep = fixtures::load(fixed)?;
            if dep.neighbor_count() != c.nodes {
                bail!(
                    "fixture has {} nodes but the configuration sets nodes = {}",
                    dep.neighbor_count(),
                    c.nodes
                );
            }
            Scenario::Fixed(dep)
        }
    };
    let trials = trials.unwrap_or(1);
    let r0 = run.r0.unwrap_or(c.discovery_radius_m);
    let mut disc: DiscoveryConfig = setup.discovery()?;
    disc.slot.tau = c.tau;
    disc.slot.sinr_noise = c.sinr_noise;

    let kinds = match run.detector {
        Some(k) => vec![k],
        None => vec![DetectorKind::Mf, DetectorKind::Rst],
    };
    let mf = setup.matched_filter()?;
    let universe = NodeSet::universe(c.nodes);
    let first = source.deployment(c.seed, 0)?;
    let mut per_detector = BTreeMap::new();
    let mut errors: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for kind in &kinds {
        let detector = match kind {
            DetectorKind::Mf => Detector::MatchedFilter(mf),
            DetectorKind::Rst => Detector::Rst(setup.rst(r0)?),
            DetectorKind::Oracle => Detector::Oracle,
        };
        let trace = run_discovery(&first, &disc, &detector, trial_seed(c.seed, 0))?;
        let summary = replicate(&source, &disc, &detector, trials, c.seed)?;
        let entry = match &trace.report {
            Some(report) => {
                run.write(&format!("detect_{}_grid.csv", kind.name()), &report.grid_csv(universe))?;
                errors.insert(kind.name(), summary.tallies.iter().map(|t| t.errors() as f64).collect());
                tally_json(&summary.tallies)
            }
            None => {
                let discovered = trace.final_state().discovered.len();
                json!({ "discovered_first_trial": discovered, "fraction_by_slot": summary.fraction_by_slot })
            }
        };
        per_detector.insert(kind.name(), entry);
    }
    let paired = match (errors.get("rst"), errors.get("mf")) {
        (Some(rst), Some(mf)) if trials >= 2 => Some(paired_t_less(rst, mf)),
        _ => None,
    };
    let summary = json!({
        "scenario": format!("{scenario:?}").to_lowercase(),
        "trials": trials,
        "seed": c.seed,
        "r0_m": r0,
        "tx_power_w": c.tx_power_w(),
        "noise_density_w_hz": c.noise_density_w_hz(),
        "noise_power_w": setup.channel.noise_power(),
        "effective_noise_w": mf.effective_noise,
        "mf_threshold": mf.threshold(),
        "first_deployment": first,
        "detectors": per_detector,
        "rst_vs_mf_errors": paired,
        "config": c,
    });
    run.write(
        "detect_summary.json",
        &format!("{}\n", serde_json::to_string_pretty(&summary)?),
    )?;
    Ok(())
}
