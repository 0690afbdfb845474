use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, Fading, PowerLawModel};
use crate::error::{invalid, Result};
use crate::rng::{derive, stream_rng, Stream};
use crate::stats::{choose, Estimate};

/// Received-power model used by the capture integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaptureModel {
    pub law: PowerLawModel,
    pub eta: f64,
    /// Discovery radius; distances passed to [`f1n`]/[`f2n`] are fractions of it.
    pub radius: f64,
    pub fading: Fading,
    pub tx_power: f64,
    /// Receiver noise in the SINR denominator; zero reproduces the
    /// noise-free closed forms.
    pub noise_power: f64,
}

impl CaptureModel {
    /// `P = r^-η` on the unit disk, no fading, no noise.
    pub fn simplified(eta: f64) -> Self {
        Self {
            law: PowerLawModel::Simplified,
            eta,
            radius: 1.0,
            fading: Fading::None,
            tx_power: 1.0,
            noise_power: 0.0,
        }
    }

    pub fn from_channel(params: &ChannelParams, radius: f64, include_noise: bool) -> Self {
        Self {
            law: params.law,
            eta: params.path_loss_exponent,
            radius,
            fading: params.fading,
            tx_power: params.tx_power_w,
            noise_power: if include_noise { params.noise_power() } else { 0.0 },
        }
    }

    fn closed_form(&self) -> bool {
        self.law == PowerLawModel::Simplified && self.fading == Fading::None && self.noise_power == 0.0
    }

    fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) {
            return Err(invalid("eta", "must be positive"));
        }
        if !(self.radius > 0.0) {
            return Err(invalid("radius", "must be positive"));
        }
        Ok(())
    }

    /// Received power at normalised distance `r` for uniform draw `u`
    /// of the fading magnitude (ignored without fading).
    fn power(&self, r_norm: f64, fade_u: f64) -> f64 {
        let p = self.tx_power * self.law.gain(r_norm * self.radius, self.eta);
        match self.fading {
            Fading::None => p,
            // |ψ|² ~ Exp(1) by inversion
            Fading::Rayleigh => p * -(1.0 - fade_u).ln(),
        }
    }
}

/// Monte Carlo settings for capture integrals without a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Total samples, drawn as antithetic pairs.
    pub samples: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 0x5EED,
        }
    }
}

/// Which node positions are pinned in a capture integral.
#[derive(Clone, Copy)]
enum Pinned {
    None,
    Own(f64),
    Interferer(f64),
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0) {
        return Err(invalid("tau", format!("must be positive, got {tau}")));
    }
    Ok(())
}

/// Antithetic Monte Carlo estimate of `Pr{P_1 ≥ τ(Σ_{i=2..n} P_i + N)}`.
fn capture_mc(n: usize, tau: f64, model: &CaptureModel, pinned: Pinned, mc: McConfig, tag: u64) -> Estimate {
    let pairs = (mc.samples / 2).max(1);
    let mut rng: ChaCha8Rng = stream_rng(mc.seed, Stream::MonteCarlo, derive(tag, Stream::MonteCarlo, n as u64));
    let mut u = vec![0.0f64; 2 * n];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..pairs {
        for v in u.iter_mut() {
            *v = rng.random();
        }
        let mut pair = 0.0;
        for flip in [false, true] {
            let draw = |i: usize| if flip { 1.0 - u[i] } else { u[i] };
            let dist = |i: usize| -> f64 {
                match (pinned, i) {
                    (Pinned::Own(r), 0) | (Pinned::Interferer(r), 1) => r,
                    _ => draw(2 * i).sqrt(),
                }
            };
            let own = model.power(dist(0), draw(1));
            let interference: f64 = (1..n).map(|i| model.power(dist(i), draw(2 * i + 1))).sum();
            if own >= tau * (interference + model.noise_power) {
                pair += 0.5;
            }
        }
        sum += pair;
        sum_sq += pair * pair;
    }
    let m = pairs as f64;
    let mean = sum / m;
    let var = if pairs > 1 {
        (sum_sq - m * mean * mean) / (m - 1.0)
    } else {
        0.0
    };
    Estimate {
        value: mean,
        std_err: (var.max(0.0) / m).sqrt(),
    }
}

/// Probability that a given one of `n` simultaneous transmitters meets
/// the SINR threshold, all distances i.i.d. uniform in the disk.
pub fn capture_prob(n: usize, tau: f64, model: &CaptureModel, mc: McConfig) -> Result<Estimate> {
    if n == 0 {
        return Err(invalid("n", "at least one transmitter is required"));
    }
    check_tau(tau)?;
    model.validate()?;
    if model.noise_power == 0.0 && n == 1 {
        return Ok(Estimate::exact(1.0));
    }
    if model.closed_form() && n == 2 {
        // P₁ ≥ τP₂ ⇔ r₂ ≥ τ^{1/η} r₁ with r² ~ U(0,1)
        let a2 = tau.powf(2.0 / model.eta);
        let v = if a2 <= 1.0 { 1.0 - a2 / 2.0 } else { 1.0 / (2.0 * a2) };
        return Ok(Estimate::exact(v));
    }
    Ok(capture_mc(n, tau, model, Pinned::None, mc, 1))
}

/// Capture probability of a transmitter pinned at normalised distance
/// `r_prime` among `n` simultaneous transmitters.
pub fn f1n(r_prime: f64, n: usize, tau: f64, model: &CaptureModel, mc: McConfig) -> Result<Estimate> {
    if n == 0 {
        return Err(invalid("n", "at least one transmitter is required"));
    }
    check_tau(tau)?;
    model.validate()?;
    check_r(r_prime)?;
    if model.noise_power == 0.0 && n == 1 {
        return Ok(Estimate::exact(1.0));
    }
    if model.closed_form() && n == 2 {
        let a2 = tau.powf(2.0 / model.eta);
        return Ok(Estimate::exact(1.0 - (a2 * r_prime * r_prime).min(1.0)));
    }
    Ok(capture_mc(n, tau, model, Pinned::Own(r_prime), mc, 2))
}

/// Capture probability of a uniformly placed transmitter among `n` when
/// one of the other transmitters sits at normalised distance `r_prime`.
/// Zero for `n = 1`, where no other transmitter exists.
pub fn f2n(r_prime: f64, n: usize, tau: f64, model: &CaptureModel, mc: McConfig) -> Result<Estimate> {
    check_tau(tau)?;
    model.validate()?;
    check_r(r_prime)?;
    if n <= 1 {
        return Ok(Estimate::exact(0.0));
    }
    if model.closed_form() && n == 2 {
        let a2 = tau.powf(2.0 / model.eta);
        return Ok(Estimate::exact((r_prime * r_prime / a2).min(1.0)));
    }
    Ok(capture_mc(n, tau, model, Pinned::Interferer(r_prime), mc, 3))
}

fn check_r(r: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(invalid(
            "r_prime",
            format!("normalised distance must be in [0, 1], got {r}"),
        ));
    }
    Ok(())
}

/// Parameters of the per-slot success expectation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaptureContext {
    /// Number of neighbors J.
    pub neighbors: usize,
    pub p_t: f64,
    pub tau: f64,
    pub model: CaptureModel,
}

impl CaptureContext {
    pub fn validate(&self) -> Result<()> {
        if self.neighbors == 0 {
            return Err(invalid("neighbors", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.p_t) {
            return Err(invalid("p_t", format!("must be in [0, 1], got {}", self.p_t)));
        }
        check_tau(self.tau)?;
        self.model.validate()
    }
}

/// `[f_1, …, f_J]`.
pub fn capture_table(neighbors: usize, tau: f64, model: &CaptureModel, mc: McConfig) -> Result<Vec<Estimate>> {
    (1..=neighbors).map(|n| capture_prob(n, tau, model, mc)).collect()
}

/// `Σ_n C(J,n) p^n (1-p)^{J-n+1} · n f_n` for a precomputed capture table.
pub fn expected_successes_from_table(table: &[Estimate], p_t: f64) -> Estimate {
    let j = table.len() as i64;
    let mut value = 0.0;
    let mut var = 0.0;
    for (i, f) in table.iter().enumerate() {
        let n = i as i64 + 1;
        let w = choose(j, n) * p_t.powi(n as i32) * (1.0 - p_t).powi((j - n + 1) as i32) * n as f64;
        value += w * f.value;
        var += (w * f.std_err).powi(2);
    }
    Estimate {
        value,
        std_err: var.sqrt(),
    }
}

/// Expected number of successful receptions per slot at one node.
pub fn expected_successes_per_slot(ctx: &CaptureContext, mc: McConfig) -> Result<Estimate> {
    ctx.validate()?;
    let table = capture_table(ctx.neighbors, ctx.tau, &ctx.model, mc)?;
    Ok(expected_successes_from_table(&table, ctx.p_t))
}

/// Three mutually-neighboring nodes under the simplified `r^-η` law: the
/// per-slot success expectation as a cubic in `p_t`.
pub fn three_node_expected_successes(p_t: f64, tau: f64, eta: f64) -> f64 {
    let p = p_t;
    if tau < 1.0 {
        let s = tau.powf(2.0 / eta);
        s * p.powi(3) - (2.0 + s) * p * p + 2.0 * p
    } else {
        let t = tau.powf(-2.0 / eta);
        (2.0 - t) * p.powi(3) + (t - 4.0) * p * p + 2.0 * p
    }
}

/// Transmit probability maximising [`three_node_expected_successes`].
pub fn optimal_pt(tau: f64, eta: f64) -> f64 {
    if tau < 1.0 {
        let s = tau.powf(2.0 / eta);
        (s + 2.0 - ((s - 1.0).powi(2) + 3.0).sqrt()) / (3.0 * s)
    } else {
        let t = tau.powf(-2.0 / eta);
        (t - 4.0 + ((t - 1.0).powi(2) + 3.0).sqrt()) / (3.0 * (t - 2.0))
    }
}

const GOLDEN_TOL: f64 = 1e-6;

/// Maximiser of `f` on `[a, b]` by golden-section search.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Optimal transmit probability for `J` neighbors, found numerically.
/// `ctx.p_t` is ignored.
pub fn optimal_pt_numeric(ctx: &CaptureContext, mc: McConfig) -> Result<f64> {
    let probe = CaptureContext { p_t: 0.5, ..*ctx };
    probe.validate()?;
    let table = capture_table(ctx.neighbors, ctx.tau, &ctx.model, mc)?;
    Ok(golden_max(
        |p| expected_successes_from_table(&table, p).value,
        0.0,
        1.0,
        GOLDEN_TOL,
    ))
}
