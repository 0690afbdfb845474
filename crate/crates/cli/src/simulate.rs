//! Replicated discovery runs: per-slot trace and a JSON summary.

use std::path::PathBuf;

use anyhow::Result;
use ndsim_core::analysis::{bernoulli_prediction, expected_successes_per_slot};
use ndsim_core::sim::{replicate, Detector, DiscoveryConfig, Scenario};
use serde_json::json;

use crate::analyze::{capture_context, load_pattern, mc, scripted_deployment, slot_config};
use crate::format::{Cell, Csv};
use crate::{DetectorKind, Run};

pub fn run(run: &Run, pattern: Option<PathBuf>) -> Result<()> {
    let c = &run.config;
    let pattern = load_pattern(run, pattern.as_deref())?;
    let neighbors = pattern.as_ref().map_or(c.nodes, |p| p.node_count() - 1);
    let scenario = match &pattern {
        Some(_) => Scenario::Fixed(scripted_deployment(c.region_radius_m, neighbors)),
        None => Scenario::Uniform {
            neighbors,
            radius_m: c.region_radius_m,
        },
    };
    let kind = run.detector.unwrap_or(DetectorKind::Oracle);
    let (slot, detector) = match kind {
        DetectorKind::Oracle => (slot_config(run)?, Detector::Oracle),
        _ => {
            let setup = c.detection_setup()?;
            let mut disc = setup.discovery()?;
            disc.slot.tau = c.tau;
            disc.slot.sinr_noise = c.sinr_noise;
            let det = match kind {
                DetectorKind::Mf => Detector::MatchedFilter(setup.matched_filter()?),
                _ => Detector::Rst(setup.rst(run.r0.unwrap_or(c.discovery_radius_m))?),
            };
            (disc.slot, det)
        }
    };
    let cfg = DiscoveryConfig {
        slot,
        max_slots: c.slots,
        early_stop_window: c.early_stop(),
        pattern,
    };
    let summary = replicate(&scenario, &cfg, &detector, c.trials, c.seed)?;

    let expected = match kind {
        DetectorKind::Oracle if !cfg.slot.reference_listens && neighbors > 0 => {
            Some(expected_successes_per_slot(&capture_context(run, neighbors)?, mc(run))?)
        }
        _ => None,
    };
    let mut csv = Csv::new(&[
        "slot",
        "mean_successes",
        "successes_std_err",
        "mean_fraction",
        "fraction_std_err",
        "bernoulli",
    ]);
    for (t, (s, f)) in summary
        .successes_by_slot
        .iter()
        .zip(&summary.fraction_by_slot)
        .enumerate()
    {
        let bern = match expected {
            Some(e) => bernoulli_prediction(t + 1, e.value, neighbors)?,
            None => f64::NAN,
        };
        csv.row(&[
            Cell::I(t as u64 + 1),
            Cell::F(s.value),
            Cell::F(s.std_err),
            Cell::F(f.value),
            Cell::F(f.std_err),
            Cell::F(bern),
        ]);
    }
    run.write("simulate_trace.csv", &csv.finish())?;

    let summary_json = json!({
        "detector": kind.name(),
        "trials": summary.trials,
        "neighbors": neighbors,
        "seed": c.seed,
        "tx_power_w": c.tx_power_w(),
        "noise_density_w_hz": c.noise_density_w_hz(),
        "noise_power_w": cfg.slot.channel.noise_power(),
        "successes_per_slot": summary.successes_per_slot,
        "expected_successes_per_slot": expected,
        "final_fraction": summary.fraction_by_slot.last(),
        "config": c,
    });
    run.write(
        "simulate_summary.json",
        &format!("{}\n", serde_json::to_string_pretty(&summary_json)?),
    )?;
    Ok(())
}
