use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::capture::{optimal_pt, three_node_expected_successes};
use crate::error::{invalid, Result};

/// Gaussian tail probability `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// `Q⁻¹(z)` by bisection on `erfc`, accurate to 1e-12 absolute.
pub fn q_inverse(z: f64) -> Result<f64> {
    if !(z > 0.0 && z < 1.0) {
        return Err(invalid("z", format!("must lie in (0, 1), got {z}")));
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if q_function(mid) > z {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Coherent M-PSK link parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpskParams {
    /// Constellation size, a power of two.
    pub m: u32,
    pub target_ber_z: f64,
    /// Bits per slot.
    pub w_bits: f64,
    pub bandwidth_hz: f64,
    /// Pulse-shape constant; the symbol rate saturates at `1/k_g`.
    pub k_g: f64,
}

impl MpskParams {
    pub fn new(m: u32, target_ber_z: f64) -> Result<Self> {
        let p = Self {
            m,
            target_ber_z,
            w_bits: 1.0,
            bandwidth_hz: 1.0,
            k_g: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 || !self.m.is_power_of_two() {
            return Err(invalid(
                "m",
                format!("constellation size must be a power of two >= 2, got {}", self.m),
            ));
        }
        if !(self.target_ber_z > 0.0 && self.target_ber_z < 0.5) {
            return Err(invalid(
                "target_ber_z",
                format!("must lie in (0, 0.5), got {}", self.target_ber_z),
            ));
        }
        if !(self.w_bits > 0.0) || !(self.bandwidth_hz > 0.0) || !(self.k_g > 0.0) {
            return Err(invalid("mpsk", "w_bits, bandwidth_hz and k_g must be positive"));
        }
        Ok(())
    }

    pub fn bits_per_symbol(&self) -> f64 {
        (self.m as f64).log2()
    }
}

/// Symbol rate in symbols/s/Hz sustaining the target bit error rate at
/// SINR threshold `tau`, capped at `1/k_g`.
pub fn mpsk_symbol_rate(tau: f64, params: &MpskParams) -> Result<f64> {
    params.validate()?;
    if !(tau >= 0.0) {
        return Err(invalid("tau", format!("must be non-negative, got {tau}")));
    }
    let z = params.target_ber_z;
    let raw = match params.m {
        2 => 2.0 * tau / q_inverse(z)?.powi(2),
        4 => tau / (2.0 * q_inverse(z)?.powi(2)),
        m => {
            let s = (std::f64::consts::PI / m as f64).sin();
            2.0 * tau * s * s / q_inverse(z * params.bits_per_symbol() / 2.0)?.powi(2)
        }
    };
    Ok(raw.min(1.0 / params.k_g))
}

/// Slot length `W / (R_s B log₂M)` in seconds.
pub fn slot_duration(tau: f64, params: &MpskParams) -> Result<f64> {
    let rate = mpsk_symbol_rate(tau, params)?;
    if !(rate > 0.0) {
        return Err(invalid("tau", "symbol rate is zero, slot duration is unbounded"));
    }
    Ok(params.w_bits / (rate * params.bandwidth_hz * params.bits_per_symbol()))
}

/// Maximum expected discoveries per second in the three-node system.
pub fn max_successes_per_second(tau: f64, eta: f64, params: &MpskParams) -> Result<f64> {
    let p = optimal_pt(tau, eta);
    let e_star = three_node_expected_successes(p, tau, eta);
    Ok(e_star / slot_duration(tau, params)?)
}
