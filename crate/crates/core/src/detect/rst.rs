use serde::{Deserialize, Serialize};

use super::Decision;
use crate::channel::ChannelParams;
use crate::error::{invalid, Error, Result};
use crate::rfs::{ln_membership_density, CardinalityPrior, NodeSet, MAX_UNIVERSE};
use crate::signals::{ReceivedVector, Signature};
use crate::stats::LogSumExp;

/// Default bound on the number of likelihood terms a MAP search may visit.
pub const DEFAULT_ENUMERATION_CAP: f64 = 1e8;

const POISSON_TAIL: f64 = 1e-12;

/// Radii splitting the disk of radius `r0` into `strips` equal-area
/// annuli, each radius bisecting its annulus by area.
pub fn equal_area_radii(r0: f64, strips: usize) -> Vec<f64> {
    (1..=strips)
        .map(|i| r0 * ((2 * i - 1) as f64 / (2 * strips) as f64).sqrt())
        .collect()
}

/// Detector belief about the unknown neighbors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RstDetectorConfig {
    pub discovery_radius: f64,
    pub prior: CardinalityPrior,
    /// Equally likely received amplitudes of a neighbor.
    pub amplitude_grid: Vec<f64>,
    pub p_t: f64,
    pub signatures: Vec<Signature>,
    pub enumeration_cap: f64,
}

impl RstDetectorConfig {
    /// Binomial prior for `nodes` uniform in a disk of radius
    /// `region_radius`, and amplitudes at the equal-area radii of the
    /// discovery disk.
    pub fn equal_area(
        channel: &ChannelParams,
        discovery_radius: f64,
        region_radius: f64,
        strips: usize,
        p_t: f64,
        signatures: Vec<Signature>,
    ) -> Result<Self> {
        let grid = equal_area_radii(discovery_radius, strips)
            .into_iter()
            .map(|r| channel.mean_power_at(r).sqrt())
            .collect();
        let cfg = Self {
            discovery_radius,
            prior: CardinalityPrior::binomial(signatures.len(), discovery_radius, region_radius),
            amplitude_grid: grid,
            p_t,
            signatures,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.amplitude_grid.is_empty() {
            return Err(invalid("amplitude_grid", "must not be empty"));
        }
        if self.amplitude_grid.iter().any(|a| !a.is_finite()) {
            return Err(invalid("amplitude_grid", "amplitudes must be finite"));
        }
        if !(0.0..=1.0).contains(&self.p_t) {
            return Err(invalid("p_t", format!("must be in [0, 1], got {}", self.p_t)));
        }
        if self.signatures.len() > MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge(self.signatures.len()));
        }
        if let Some(first) = self.signatures.first() {
            if self.signatures.iter().any(|s| s.len() != first.len()) {
                return Err(invalid("signatures", "all signatures must have the same length"));
            }
        }
        Ok(())
    }

    pub fn universe(&self) -> NodeSet {
        self.signatures.iter().map(|s| s.node_id).collect()
    }

    fn signature(&self, id: u32) -> Result<&Signature> {
        self.signatures
            .iter()
            .find(|s| s.node_id == id)
            .ok_or(Error::MissingNode(id))
    }

    fn max_cardinality(&self) -> usize {
        self.prior.support_max(POISSON_TAIL)
    }
}

fn real(y: &ReceivedVector) -> Result<&[f64]> {
    y.as_real().ok_or(Error::ComplexUnsupported)
}

fn check_noise(noise: f64) -> Result<()> {
    if !(noise > 0.0) {
        return Err(invalid(
            "noise",
            format!("likelihood needs positive noise power, got {noise}"),
        ));
    }
    Ok(())
}

/// Gaussian log-likelihood of `y` when the members of `x` (ascending id
/// order) transmit with the given amplitudes.
pub fn rst_log_likelihood(
    y: &ReceivedVector,
    x: NodeSet,
    amplitudes: &[f64],
    signatures: &[Signature],
    noise: f64,
) -> Result<f64> {
    check_noise(noise)?;
    let y = real(y)?;
    if amplitudes.len() != x.len() {
        return Err(invalid(
            "amplitudes",
            format!("{} amplitudes for {} nodes", amplitudes.len(), x.len()),
        ));
    }
    let mut r = y.to_vec();
    for (id, &g) in x.iter().zip(amplitudes) {
        let s = signatures
            .iter()
            .find(|s| s.node_id == id)
            .ok_or(Error::MissingNode(id))?;
        if s.len() != r.len() {
            return Err(invalid(
                "signatures",
                "signature length differs from the received vector",
            ));
        }
        for (ri, &c) in r.iter_mut().zip(s.chips()) {
            *ri -= g * c as f64;
        }
    }
    let e: f64 = r.iter().map(|v| v * v).sum();
    let l = y.len() as f64;
    Ok(-0.5 * l * (2.0 * std::f64::consts::PI * noise).ln() - e / (2.0 * noise))
}

pub fn rst_gaussian_likelihood(
    y: &ReceivedVector,
    x: NodeSet,
    amplitudes: &[f64],
    signatures: &[Signature],
    noise: f64,
) -> Result<f64> {
    Ok(rst_log_likelihood(y, x, amplitudes, signatures, noise)?.exp())
}

/// Log of the likelihood averaged over every assignment of grid amplitudes
/// to the members of `x`, by direct enumeration.
pub fn rst_log_marginal_likelihood(y: &ReceivedVector, x: NodeSet, cfg: &RstDetectorConfig, noise: f64) -> Result<f64> {
    cfg.validate()?;
    let m = cfg.amplitude_grid.len();
    let n = x.len();
    let terms = (m as f64).powi(n as i32);
    if terms > cfg.enumeration_cap {
        return Err(Error::EnumerationTooLarge {
            terms,
            cap: cfg.enumeration_cap,
        });
    }
    for id in x.iter() {
        cfg.signature(id)?;
    }
    let mut acc = LogSumExp::default();
    let mut idx = vec![0usize; n];
    let mut amps = vec![0.0; n];
    loop {
        for (a, &i) in amps.iter_mut().zip(&idx) {
            *a = cfg.amplitude_grid[i];
        }
        acc.push(rst_log_likelihood(y, x, &amps, &cfg.signatures, noise)?);
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(acc.value() - n as f64 * (m as f64).ln());
            }
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

pub fn rst_marginal_likelihood(y: &ReceivedVector, x: NodeSet, cfg: &RstDetectorConfig, noise: f64) -> Result<f64> {
    Ok(rst_log_marginal_likelihood(y, x, cfg, noise)?.exp())
}

/// Log MAP objective of the hypothesis `(x, j_prime)`.
pub fn rst_objective(
    y: &ReceivedVector,
    x: NodeSet,
    j_prime: usize,
    cfg: &RstDetectorConfig,
    noise: f64,
) -> Result<f64> {
    Ok(rst_log_marginal_likelihood(y, x, cfg, noise)?
        + ln_membership_density(x, j_prime, cfg.p_t)
        + cfg.prior.ln_pmf(j_prime))
}

/// Depth-first enumeration of amplitude assignments. Each level fixes one
/// node's amplitude (zero when absent) and updates the residual energy `e`
/// and the residual correlations `c` with the remaining signatures.
struct Search<'a> {
    k: usize,
    gram: Vec<f64>,
    grid: &'a [f64],
    inv_2n: f64,
    acc: Vec<LogSumExp>,
}

impl Search<'_> {
    fn visit(&mut self, level: usize, mask: usize, e: f64, c: &[f64; MAX_UNIVERSE]) {
        let k = self.k;
        if level == k {
            self.acc[mask].push(-e * self.inv_2n);
            return;
        }
        let g_ll = self.gram[level * k + level];
        let bit = 1usize << level;
        if level + 1 == k {
            self.acc[mask].push(-e * self.inv_2n);
            let slot = &mut self.acc[mask | bit];
            for &g in self.grid {
                slot.push(-(e - 2.0 * g * c[level] + g * g * g_ll) * self.inv_2n);
            }
            return;
        }
        self.visit(level + 1, mask, e, c);
        let mut next = *c;
        for gi in 0..self.grid.len() {
            let g = self.grid[gi];
            let e2 = e - 2.0 * g * c[level] + g * g * g_ll;
            for j in level + 1..k {
                next[j] = c[j] - g * self.gram[level * k + j];
            }
            self.visit(level + 1, mask | bit, e2, &next);
        }
    }
}

/// Joint MAP estimate of the transmitter set and neighbor count.
///
/// Ties go to the smaller set, then the smaller count, then the smaller
/// bitmask over the signature order of `cfg`.
pub fn rst_map_decide(y: &ReceivedVector, cfg: &RstDetectorConfig, noise: f64) -> Result<Decision> {
    cfg.validate()?;
    check_noise(noise)?;
    let yv = real(y)?;
    let k = cfg.signatures.len();
    let m = cfg.amplitude_grid.len();
    let terms = ((m + 1) as f64).powi(k as i32);
    if terms > cfg.enumeration_cap {
        return Err(Error::EnumerationTooLarge {
            terms,
            cap: cfg.enumeration_cap,
        });
    }
    let sig: Vec<Vec<f64>> = cfg.signatures.iter().map(Signature::to_f64).collect();
    if sig.iter().any(|s| s.len() != yv.len()) {
        return Err(invalid(
            "signatures",
            "signature length differs from the received vector",
        ));
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut gram = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            gram[i * k + j] = dot(&sig[i], &sig[j]);
        }
    }
    let mut c = [0.0; MAX_UNIVERSE];
    for (ci, s) in c.iter_mut().zip(&sig) {
        *ci = dot(yv, s);
    }
    let mut search = Search {
        k,
        gram,
        grid: &cfg.amplitude_grid,
        inv_2n: 1.0 / (2.0 * noise),
        acc: vec![LogSumExp::default(); 1 << k],
    };
    search.visit(0, 0, dot(yv, yv), &c);

    let base = -0.5 * yv.len() as f64 * (2.0 * std::f64::consts::PI * noise).ln();
    let ln_m = (m as f64).ln();
    // best mask per cardinality, first maximum in ascending mask order
    let mut best_by_card: Vec<Option<(f64, usize)>> = vec![None; k + 1];
    for (mask, acc) in search.acc.iter().enumerate() {
        let card = mask.count_ones() as usize;
        let v = base + acc.value() - card as f64 * ln_m;
        match best_by_card[card] {
            Some((b, _)) if v <= b => {}
            _ => best_by_card[card] = Some((v, mask)),
        }
    }
    let j_max = cfg.max_cardinality();
    let mut best: Option<(f64, usize, usize)> = None;
    for (card, entry) in best_by_card.iter().enumerate() {
        let Some((lm, mask)) = *entry else { continue };
        for j in card..=j_max.max(card) {
            let ln_prior = cfg.prior.ln_pmf(j);
            if ln_prior == f64::NEG_INFINITY {
                continue;
            }
            let members = NodeSet::from_mask((1u64 << card) - 1);
            let v = lm + ln_membership_density(members, j, cfg.p_t) + ln_prior;
            if v == f64::NEG_INFINITY {
                continue;
            }
            if best.is_none_or(|(b, _, _)| v > b) {
                best = Some((v, mask, j));
            }
        }
    }
    let (_, mask, j) = best.ok_or_else(|| invalid("prior", "no hypothesis has positive probability"))?;
    let detected = cfg
        .signatures
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, s)| s.node_id)
        .collect();
    Ok(Decision {
        detected_set: detected,
        estimated_j: Some(j),
        per_node_scores: Default::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{dbm_to_watts, Fading, PowerLawModel};
    use crate::rng::{stream_rng, Stream};
    use crate::signals::default_signatures;
    use rand::Rng;

    #[test]
    fn equal_area_construction() {
        assert!((equal_area_radii(2.0, 1)[0] - 2f64.sqrt()).abs() < 1e-15);
        let r = equal_area_radii(1.0, 7);
        for (i, v) in r.iter().enumerate() {
            assert!((v * v - (2 * i + 1) as f64 / 14.0).abs() < 1e-15);
            // each radius bisects the annulus between boundaries √(i/7), √((i+1)/7)
            let inner = i as f64 / 7.0;
            let outer = (i + 1) as f64 / 7.0;
            assert!(((v * v - inner) - (outer - v * v)).abs() < 1e-15);
        }
    }

    fn small_cfg(k: usize, grid: Vec<f64>, p_t: f64) -> RstDetectorConfig {
        RstDetectorConfig {
            discovery_radius: 1.0,
            prior: CardinalityPrior::Binomial { trials: k, prob: 0.6 },
            amplitude_grid: grid,
            p_t,
            signatures: default_signatures(k).unwrap(),
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }

    fn brute_force(y: &ReceivedVector, cfg: &RstDetectorConfig, noise: f64) -> (f64, NodeSet, usize) {
        let k = cfg.signatures.len();
        let mut best = (f64::NEG_INFINITY, NodeSet::EMPTY, 0);
        for mask in 0..1u64 << k {
            let x = NodeSet::from_mask(mask);
            for j in x.len()..=k {
                let v = rst_objective(y, x, j, cfg, noise).unwrap();
                if v > best.0 {
                    best = (v, x, j);
                }
            }
        }
        best
    }

    #[test]
    fn search_matches_brute_force() {
        let mut rng = stream_rng(11, Stream::Trial, 0);
        let sigs = default_signatures(4).unwrap();
        for trial in 0..30 {
            let cfg = small_cfg(4, vec![0.3, 0.7, 1.1], 0.4);
            let noise = 0.05 + rng.random::<f64>() * 0.5;
            let mut y = vec![0.0; 15];
            for s in &sigs {
                if rng.random::<f64>() < 0.5 {
                    let g = cfg.amplitude_grid[rng.random_range(0..3)];
                    for (yi, c) in y.iter_mut().zip(s.to_f64()) {
                        *yi += g * c;
                    }
                }
            }
            for yi in y.iter_mut() {
                *yi += noise.sqrt() * (rng.random::<f64>() - 0.5) * 3.0;
            }
            let y = ReceivedVector::Real(y);
            let d = rst_map_decide(&y, &cfg, noise).unwrap();
            let (bv, bx, _) = brute_force(&y, &cfg, noise);
            let got = rst_objective(&y, d.detected_set, d.estimated_j.unwrap(), &cfg, noise).unwrap();
            assert!((got - bv).abs() < 1e-8 * bv.abs().max(1.0), "trial {trial}");
            assert_eq!(d.detected_set, bx, "trial {trial}");
            assert!(d.detected_set.len() <= d.estimated_j.unwrap());
        }
    }

    #[test]
    fn likelihood_identities() {
        let sigs = default_signatures(3).unwrap();
        let noise = 0.2;
        let y: Vec<f64> = sigs[0]
            .to_f64()
            .iter()
            .zip(sigs[2].to_f64())
            .map(|(a, b)| 0.5 * a + 0.8 * b)
            .collect();
        let yv = ReceivedVector::Real(y.clone());
        let x: NodeSet = [1, 3].into_iter().collect();
        let peak = rst_log_likelihood(&yv, x, &[0.5, 0.8], &sigs, noise).unwrap();
        assert!((peak + 7.5 * (2.0 * std::f64::consts::PI * noise).ln()).abs() < 1e-12);
        let empty = rst_log_likelihood(&yv, NodeSet::EMPTY, &[], &sigs, noise).unwrap();
        let energy: f64 = y.iter().map(|v| v * v).sum();
        assert!(((peak - empty) - energy / (2.0 * noise)).abs() < 1e-10);
        assert!(rst_log_likelihood(&yv, x, &[0.5], &sigs, noise).is_err());
        assert!(rst_log_likelihood(&yv, x, &[0.5, 0.8], &sigs, 0.0).is_err());
        let cfg = small_cfg(3, vec![0.2, 0.5, 0.8, 1.0, 1.3, 1.6, 2.0], 0.5);
        let single: NodeSet = [2].into_iter().collect();
        let mean: f64 = cfg
            .amplitude_grid
            .iter()
            .map(|&g| rst_gaussian_likelihood(&yv, single, &[g], &sigs, noise).unwrap())
            .sum::<f64>()
            / 7.0;
        let lm = rst_marginal_likelihood(&yv, single, &cfg, noise).unwrap();
        assert!((lm / mean - 1.0).abs() < 1e-12);
        let e0 = rst_marginal_likelihood(&yv, NodeSet::EMPTY, &cfg, noise).unwrap();
        assert!((e0 / empty.exp() - 1.0).abs() < 1e-12);
        let complex = ReceivedVector::Complex(vec![Default::default(); 15]);
        assert!(matches!(
            rst_map_decide(&complex, &cfg, noise),
            Err(Error::ComplexUnsupported)
        ));
    }

    #[test]
    fn strong_single_node_detected() {
        let channel = ChannelParams::new(
            dbm_to_watts(-24.0),
            4.0,
            Fading::None,
            PowerLawModel::Offset,
            dbm_to_watts(-173.0),
            100.0,
        )
        .unwrap();
        let sigs = default_signatures(8).unwrap();
        let cfg = RstDetectorConfig::equal_area(&channel, 1000.0, 1000.0, 7, 0.5, sigs.clone()).unwrap();
        let g = channel.mean_power_at(50.0).sqrt();
        let y = ReceivedVector::Real(sigs[2].to_f64().iter().map(|c| g * c).collect());
        let d = rst_map_decide(&y, &cfg, channel.noise_power()).unwrap();
        assert_eq!(d.detected_set, [3].into_iter().collect());
    }

    #[test]
    fn prior_dominates_flat_likelihood() {
        let mut cfg = small_cfg(4, vec![1e-9], 1e-6);
        cfg.prior = CardinalityPrior::Binomial { trials: 4, prob: 0.5 };
        let y = ReceivedVector::Real(vec![0.0; 15]);
        let d = rst_map_decide(&y, &cfg, 1.0).unwrap();
        assert!(d.detected_set.is_empty());
    }

    #[test]
    fn enumeration_cap_enforced() {
        let mut cfg = small_cfg(4, vec![1.0; 7], 0.5);
        cfg.enumeration_cap = 100.0;
        let y = ReceivedVector::Real(vec![0.0; 15]);
        assert!(matches!(
            rst_map_decide(&y, &cfg, 1.0),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }
}
