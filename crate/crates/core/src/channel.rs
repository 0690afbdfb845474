//! Path loss, fading and the SINR capture rule.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::deployment::{distance_cdf, DiskRegion};
use crate::error::{invalid, Result};
use crate::quad;
use crate::rfs::NodeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Fading {
    #[default]
    None,
    Rayleigh,
}

/// Distance dependence of the mean received power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PowerLawModel {
    /// `G (1 + r)^-η`, finite at r = 0.
    #[default]
    Offset,
    /// `G r^-η`, used with the discovery radius normalised to 1.
    Simplified,
}

impl PowerLawModel {
    /// Path gain at distance `r`.
    pub fn gain(self, r: f64, eta: f64) -> f64 {
        match self {
            PowerLawModel::Offset => (1.0 + r).powf(-eta),
            PowerLawModel::Simplified => r.powf(-eta),
        }
    }

    /// Distance at which the gain equals `g` (inverse of [`gain`](Self::gain)).
    pub fn distance_for_gain(self, g: f64, eta: f64) -> f64 {
        match self {
            PowerLawModel::Offset => g.powf(-1.0 / eta) - 1.0,
            PowerLawModel::Simplified => g.powf(-1.0 / eta),
        }
    }

    fn offset(self) -> f64 {
        match self {
            PowerLawModel::Offset => 1.0,
            PowerLawModel::Simplified => 0.0,
        }
    }
}

/// Convert a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * (w * 1e3).log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Transmit power G in watts.
    pub tx_power_w: f64,
    /// Path loss exponent η.
    pub path_loss_exponent: f64,
    pub fading: Fading,
    pub law: PowerLawModel,
    /// Noise spectral density N₀ in W/Hz.
    pub noise_density_w_hz: f64,
    pub bandwidth_hz: f64,
}

impl ChannelParams {
    pub fn new(
        tx_power_w: f64,
        path_loss_exponent: f64,
        fading: Fading,
        law: PowerLawModel,
        noise_density_w_hz: f64,
        bandwidth_hz: f64,
    ) -> Result<Self> {
        let p = Self {
            tx_power_w,
            path_loss_exponent,
            fading,
            law,
            noise_density_w_hz,
            bandwidth_hz,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.path_loss_exponent > 0.0) {
            return Err(invalid("path_loss_exponent", "must be positive"));
        }
        if !(self.tx_power_w >= 0.0) {
            return Err(invalid("tx_power_w", "must be non-negative"));
        }
        if !(self.noise_density_w_hz >= 0.0) {
            return Err(invalid("noise_density_w_hz", "must be non-negative"));
        }
        if !(self.bandwidth_hz >= 0.0) {
            return Err(invalid("bandwidth_hz", "must be non-negative"));
        }
        Ok(())
    }

    /// Unit-power, noiseless channel with the simplified `r^-η` law.
    pub fn simplified(eta: f64) -> Self {
        Self {
            tx_power_w: 1.0,
            path_loss_exponent: eta,
            fading: Fading::None,
            law: PowerLawModel::Simplified,
            noise_density_w_hz: 0.0,
            bandwidth_hz: 0.0,
        }
    }

    /// N = N₀·B.
    pub fn noise_power(&self) -> f64 {
        self.noise_density_w_hz * self.bandwidth_hz
    }

    /// Mean received power at distance `r` (fading averaged out).
    pub fn mean_power_at(&self, r: f64) -> f64 {
        self.tx_power_w * self.law.gain(r, self.path_loss_exponent)
    }
}

/// Draw a standard circularly-symmetric complex Gaussian fading coefficient.
pub fn sample_fading<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex amplitude `√(G·gain(r))·ψ` of a signal received from distance `dist`.
///
/// `fading_draw` must be present exactly when the channel has Rayleigh fading.
pub fn amplitude(dist: f64, params: &ChannelParams, fading_draw: Option<Complex64>) -> Result<Complex64> {
    if !(dist >= 0.0) {
        return Err(invalid("dist", format!("must be non-negative, got {dist}")));
    }
    let a = params.mean_power_at(dist).sqrt();
    match (params.fading, fading_draw) {
        (Fading::None, None) => Ok(Complex64::new(a, 0.0)),
        (Fading::Rayleigh, Some(psi)) => Ok(psi * a),
        (Fading::None, Some(_)) => Err(invalid("fading_draw", "given for a non-fading channel")),
        (Fading::Rayleigh, None) => Err(invalid("fading_draw", "required for Rayleigh fading")),
    }
}

const CDF_REL_TOL: f64 = 1e-8;

/// CDF of the received power of a node placed uniformly in `region`.
pub fn rx_power_cdf(x: f64, params: &ChannelParams, region: DiskRegion) -> Result<f64> {
    if !(x > 0.0) {
        return Err(invalid("x", format!("power must be positive, got {x}")));
    }
    let g = params.tx_power_w;
    let eta = params.path_loss_exponent;
    let off = params.law.offset();
    // r(ω): distance below which the received power exceeds x, given |ψ|² = ω
    let r_of = |w: f64| (w * g / x).powf(1.0 / eta) - off;
    let f = match params.fading {
        Fading::None => 1.0 - distance_cdf(r_of(1.0), region),
        Fading::Rayleigh => {
            let big_r = region.radius();
            let w_lo = x * off.powf(eta) / g;
            let w_hi = x * (big_r + off).powf(eta) / g;
            // beyond this e^-ω contributes nothing in f64
            let cut = w_lo + 750.0;
            let upper = w_hi.min(cut);
            let body = if upper > w_lo {
                quad::integrate(
                    |w| {
                        let r = r_of(w).clamp(0.0, big_r);
                        (r / big_r).powi(2) * (-w).exp()
                    },
                    w_lo,
                    upper,
                    CDF_REL_TOL,
                )
            } else {
                0.0
            };
            1.0 - (body + (-w_hi).exp())
        }
    };
    Ok(f.clamp(0.0, 1.0))
}

/// Mean received power over a node placed uniformly in `region`.
pub fn mean_rx_power(params: &ChannelParams, region: DiskRegion) -> Result<f64> {
    let big_r = region.radius();
    let eta = params.path_loss_exponent;
    match params.law {
        PowerLawModel::Offset => {
            let integrand = |r: f64| (1.0 + r).powf(-eta) * 2.0 * r / (big_r * big_r);
            Ok(params.tx_power_w * quad::integrate(integrand, 0.0, big_r, 1e-12))
        }
        PowerLawModel::Simplified => {
            if eta >= 2.0 {
                return Err(invalid(
                    "path_loss_exponent",
                    "mean power of the r^-η law diverges for η ≥ 2",
                ));
            }
            Ok(params.tx_power_w * 2.0 * big_r.powf(-eta) / (2.0 - eta))
        }
    }
}

/// `P_k / (Σ_{i≠k} P_i + N)`; `+∞` when the denominator is zero.
pub fn sinr(k: usize, powers: &[f64], noise: f64) -> f64 {
    let interference: f64 = powers.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, p)| p).sum();
    let den = interference + noise;
    if den == 0.0 {
        f64::INFINITY
    } else {
        powers[k] / den
    }
}

/// Transmitters whose SINR reaches `tau`.
///
/// For `tau ≥ 1` at most one transmitter qualifies, except for exact power
/// ties at `tau = 1` with zero noise, where every tied transmitter has SINR
/// exactly 1.
pub fn success_set(powers: &[(u32, f64)], noise: f64, tau: f64) -> NodeSet {
    let p: Vec<f64> = powers.iter().map(|e| e.1).collect();
    powers
        .iter()
        .enumerate()
        .filter(|&(k, _)| sinr(k, &p, noise) >= tau)
        .map(|(_, e)| e.0)
        .collect()
}
