//! Quick invariant checks runnable from an installed binary.

use ndsim_core::analysis::{
    expected_successes_per_slot, optimal_pt, optimal_pt_numeric, slot_basis_curve, three_node_expected_successes,
    CaptureContext, CaptureModel, McConfig,
};
use ndsim_core::channel::{success_set, ChannelParams};
use ndsim_core::detect::effective_noise;
use ndsim_core::rfs::{belief_mass_from_pmf, mobius_inverse, SetFunction};
use ndsim_core::rng::{stream_rng, Stream};
use ndsim_core::signals::{cyclic_autocorrelation, msequence};
use ndsim_core::sim::{run_discovery, Detector, DiscoveryConfig, RolePattern, SlotConfig, EXAMPLE_PATTERN_CSV};
use rand::Rng;

use crate::analyze::scripted_deployment;
use crate::config::{ExperimentConfig, Preset};
use crate::fixtures;
use crate::DetectScenario;

fn optimum() -> bool {
    let p = optimal_pt(1.0, 4.0);
    let ctx = CaptureContext {
        neighbors: 2,
        p_t: p,
        tau: 1.0,
        model: CaptureModel::simplified(4.0),
    };
    let numeric = optimal_pt_numeric(&ctx, McConfig::default()).unwrap_or(f64::NAN);
    let table = expected_successes_per_slot(&ctx, McConfig::default()).map_or(f64::NAN, |e| e.value);
    (p - numeric).abs() < 1e-5 && (table - three_node_expected_successes(p, 1.0, 4.0)).abs() < 1e-12
}

fn mobius() -> bool {
    let mut rng = stream_rng(3, Stream::MonteCarlo, 0);
    let raw: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let Ok(pmf) = SetFunction::new(4, raw.iter().map(|v| v / total).collect()) else {
        return false;
    };
    let Ok(beta) = belief_mass_from_pmf(&pmf) else {
        return false;
    };
    let back = mobius_inverse(&beta);
    pmf.values()
        .iter()
        .zip(back.values())
        .all(|(a, b)| (a - b).abs() < 1e-12)
}

fn msequence_autocorrelation() -> bool {
    let Ok(chips) = msequence(4, ndsim_core::signals::DEFAULT_POLY, 0) else {
        return false;
    };
    chips.len() == 15 && (0..15).all(|l| cyclic_autocorrelation(&chips, l) == if l == 0 { 15 } else { -1 })
}

fn effective_noise_mean() -> bool {
    let n = effective_noise(8, 0.5, 2.0, 1.0).unwrap_or(f64::NAN);
    (n - (1.0 + 7.0 * 0.5 * 2.0)).abs() < 1e-12
}

fn success_set_antitone() -> bool {
    let mut rng = stream_rng(4, Stream::MonteCarlo, 0);
    (0..200).all(|_| {
        let powers: Vec<(u32, f64)> = (1..=5).map(|i| (i, rng.random::<f64>())).collect();
        let lo = success_set(&powers, 0.01, 0.5);
        let hi = success_set(&powers, 0.01, 2.0);
        hi.is_subset(lo)
    })
}

fn slot_basis_monotone() -> bool {
    slot_basis_curve(&[1, 0, 2, 1, 0, 1], 3)
        .is_ok_and(|c| c.windows(2).all(|w| w[0] <= w[1]) && c.iter().all(|&v| (0.0..=1.0).contains(&v)))
}

fn fixtures_regenerate() -> bool {
    [DetectScenario::Deploy1, DetectScenario::Deploy2]
        .into_iter()
        .all(|s| matches!((fixtures::load(s), fixtures::generate(s)), (Ok(a), Ok(b)) if a == b))
}

fn config_round_trip() -> bool {
    [Preset::ThreeNode, Preset::Detection].into_iter().all(|p| {
        let c = ExperimentConfig::preset(p);
        ExperimentConfig::parse(&c.to_toml(), Preset::ThreeNode).is_ok_and(|b| b == c)
    })
}

fn deterministic_replay() -> bool {
    let Ok(pattern) = RolePattern::parse_csv(EXAMPLE_PATTERN_CSV) else {
        return false;
    };
    let cfg = DiscoveryConfig {
        slot: SlotConfig::protocol(ChannelParams::simplified(4.0), 0.4226, 1.0),
        max_slots: 15,
        early_stop_window: None,
        pattern: Some(pattern),
    };
    let dep = scripted_deployment(1.0, 2);
    let a = run_discovery(&dep, &cfg, &Detector::Oracle, 9);
    let b = run_discovery(&dep, &cfg, &Detector::Oracle, 9);
    matches!((a, b), (Ok(a), Ok(b)) if a == b)
}

type Check = (&'static str, fn() -> bool);

/// Prints one line per check; true when all pass.
pub fn run() -> bool {
    let checks: [Check; 9] = [
        ("optimal transmit probability", optimum),
        ("mobius round trip", mobius),
        ("m-sequence autocorrelation", msequence_autocorrelation),
        ("effective noise mean", effective_noise_mean),
        ("success set antitone in tau", success_set_antitone),
        ("slot-basis curve monotone", slot_basis_monotone),
        ("fixtures regenerate", fixtures_regenerate),
        ("config round trip", config_round_trip),
        ("deterministic replay", deterministic_replay),
    ];
    let mut ok = true;
    for (name, check) in checks {
        let pass = check();
        ok &= pass;
        println!("{} {name}", if pass { "PASS" } else { "FAIL" });
    }
    ok
}
