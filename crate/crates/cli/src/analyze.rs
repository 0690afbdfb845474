//! Analytic curves written as CSV.

use anyhow::{bail, Result};
use ndsim_core::analysis::{
    bernoulli_prediction, conditional_membership, expected_successes_per_slot, max_successes_per_second, optimal_pt,
    slot_basis_curve, three_node_expected_successes, CaptureContext, McConfig,
};
use ndsim_core::deployment::Deployment;
use ndsim_core::sim::{replicate, run_discovery, Detector, DiscoveryConfig, RolePattern, Scenario, SlotConfig};

use crate::format::{Cell, Csv};
use crate::{Figure, Run};

/// `10^(lo + i/per_decade)` for every step from `lo` to `hi` decades.
fn log_grid(lo: i32, hi: i32, per_decade: i32) -> Vec<f64> {
    (lo * per_decade..=hi * per_decade)
        .map(|i| 10f64.powf(i as f64 / per_decade as f64))
        .collect()
}

pub fn run(run: &Run, figure: Figure) -> Result<()> {
    match figure {
        Figure::Fig1 => fig1(run),
        Figure::Fig2 => fig2(run),
        Figure::Fig3 => fig3(run),
        Figure::Fig4 => fig4(run),
    }
}

fn fig1(run: &Run) -> Result<()> {
    let eta = run.config.path_loss_exponent;
    let mut csv = Csv::new(&["tau", "pt_star", "e_star"]);
    for tau in log_grid(-1, 2, 20) {
        let p = optimal_pt(tau, eta);
        csv.row(&[
            Cell::F(tau),
            Cell::F(p),
            Cell::F(three_node_expected_successes(p, tau, eta)),
        ]);
    }
    run.write("fig1.csv", &csv.finish())?;
    Ok(())
}

fn fig2(run: &Run) -> Result<()> {
    let eta = run.config.path_loss_exponent;
    let mut csv = Csv::new(&["tau", "M", "nodes_per_sec"]);
    for m in [2, 4, 8] {
        let params = run.config.mpsk(m)?;
        for tau in log_grid(-2, 3, 20) {
            let rate = max_successes_per_second(tau, eta, &params)?;
            csv.row(&[Cell::F(tau), Cell::I(m as u64), Cell::F(rate)]);
        }
    }
    run.write("fig2.csv", &csv.finish())?;
    Ok(())
}

pub fn mc(run: &Run) -> McConfig {
    McConfig {
        seed: run.config.seed,
        ..McConfig::default()
    }
}

pub fn capture_context(run: &Run, neighbors: usize) -> Result<CaptureContext> {
    let ctx = CaptureContext {
        neighbors,
        p_t: run.config.p_t,
        tau: run.config.tau,
        model: run.config.capture_model()?,
    };
    ctx.validate()?;
    Ok(ctx)
}

pub fn load_pattern(run: &Run, path: Option<&std::path::Path>) -> Result<Option<RolePattern>> {
    let path = path
        .map(std::path::Path::to_path_buf)
        .or_else(|| run.config.pattern_file.as_ref().map(Into::into));
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(&p).map_err(|e| anyhow::anyhow!("reading {}: {e}", p.display()))?;
            Ok(Some(RolePattern::parse_csv(&text)?))
        }
        None => Ok(None),
    }
}

/// Neighbors on the x-axis for a scripted run: 0.3R and 0.7R for two
/// neighbors, otherwise strip midpoints `(i - 1/2)R/K`.
pub fn scripted_deployment(radius: f64, neighbors: usize) -> Deployment {
    let d: Vec<f64> = if neighbors == 2 {
        vec![0.3 * radius, 0.7 * radius]
    } else {
        (1..=neighbors)
            .map(|i| (i as f64 - 0.5) * radius / neighbors as f64)
            .collect()
    };
    Deployment::from_distances(radius, &d)
}

pub fn slot_config(run: &Run) -> Result<SlotConfig> {
    let mut slot = SlotConfig::protocol(run.config.channel()?, run.config.p_t, run.config.tau);
    slot.sinr_noise = run.config.sinr_noise;
    slot.validate()?;
    Ok(slot)
}

fn fig3(run: &Run) -> Result<()> {
    let pattern = match load_pattern(run, None)? {
        Some(p) => p,
        None => RolePattern::parse_csv(ndsim_core::sim::EXAMPLE_PATTERN_CSV)?,
    };
    let k = pattern.node_count() - 1;
    if k == 0 {
        bail!("pattern needs at least one neighbor row");
    }
    let dep = scripted_deployment(run.config.region_radius_m, k);
    let scripted = DiscoveryConfig {
        slot: slot_config(run)?,
        max_slots: pattern.slots(),
        early_stop_window: None,
        pattern: Some(pattern),
    };
    let e_star = expected_successes_per_slot(&capture_context(run, k)?, mc(run))?.value;
    let trace = run_discovery(&dep, &scripted, &Detector::Oracle, run.config.seed)?;
    let h: Vec<usize> = trace.records.iter().map(|r| r.realization.success_set.len()).collect();
    let basis = slot_basis_curve(&h, k)?;
    let mut csv = Csv::new(&["slot", "actual_fraction", "slot_basis", "bernoulli"]);
    for (t, rec) in trace.records.iter().enumerate() {
        csv.row(&[
            Cell::I(t as u64 + 1),
            Cell::F(rec.fraction_discovered),
            Cell::F(basis[t]),
            Cell::F(bernoulli_prediction(t + 1, e_star, k)?),
        ]);
    }
    run.write("fig3.csv", &csv.finish())?;

    // the same deployment with random roles, averaged over trials
    let random = DiscoveryConfig {
        pattern: None,
        ..scripted
    };
    let summary = replicate(
        &Scenario::Fixed(dep),
        &random,
        &Detector::Oracle,
        run.config.trials,
        run.config.seed,
    )?;
    let mut csv = Csv::new(&["slot", "mean_fraction", "std_err", "bernoulli"]);
    for (t, est) in summary.fraction_by_slot.iter().enumerate() {
        csv.row(&[
            Cell::I(t as u64 + 1),
            Cell::F(est.value),
            Cell::F(est.std_err),
            Cell::F(bernoulli_prediction(t + 1, e_star, k)?),
        ]);
    }
    run.write("fig3_replicated.csv", &csv.finish())?;
    Ok(())
}

fn fig4(run: &Run) -> Result<()> {
    let ctx = capture_context(run, run.config.nodes)?;
    let mut csv = Csv::new(&["r_prime", "probability"]);
    for i in 0..=100 {
        let r = i as f64 / 100.0;
        csv.row(&[Cell::F(r), Cell::F(conditional_membership(r, 1, &ctx, mc(run))?)]);
    }
    run.write("fig4.csv", &csv.finish())?;
    Ok(())
}
