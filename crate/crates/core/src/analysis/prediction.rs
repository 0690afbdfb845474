use serde::{Deserialize, Serialize};

use super::capture::{capture_prob, f1n, f2n, CaptureContext, McConfig};
use crate::error::{invalid, Result};
use crate::stats::choose;

/// Probability a given neighbor is discovered after the slots with
/// success counts `h`, assuming each success picks a neighbor uniformly.
pub fn slot_basis_prediction(h: &[usize], neighbors: usize) -> Result<f64> {
    Ok(*slot_basis_curve(h, neighbors)?.last().unwrap_or(&0.0))
}

/// Running value of [`slot_basis_prediction`] after each slot.
pub fn slot_basis_curve(h: &[usize], neighbors: usize) -> Result<Vec<f64>> {
    if neighbors == 0 {
        return Err(invalid("neighbors", "must be at least 1"));
    }
    let j = neighbors as f64;
    let mut miss = 1.0;
    let mut out = Vec::with_capacity(h.len());
    for (t, &ht) in h.iter().enumerate() {
        if ht > neighbors {
            return Err(invalid(
                "h",
                format!("slot {} has {ht} successes with only {neighbors} neighbors", t + 1),
            ));
        }
        miss *= 1.0 - ht as f64 / j;
        out.push(1.0 - miss);
    }
    Ok(out)
}

/// Poisson approximation `1 − exp(−D·e*/J)` of the discovered fraction.
pub fn bernoulli_prediction(slots: usize, e_star: f64, neighbors: usize) -> Result<f64> {
    if neighbors == 0 {
        return Err(invalid("neighbors", "must be at least 1"));
    }
    Ok(1.0 - (-(slots as f64) * e_star / neighbors as f64).exp())
}

/// Numerator and denominator of the conditional membership ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedTerms {
    /// Model value of `Pr{k succeeds, h successes | r_k = r′}`.
    pub joint: f64,
    /// Model value of `Pr{h successes | r_k = r′}`.
    pub count: f64,
}

impl CorrelatedTerms {
    pub fn ratio(&self) -> f64 {
        self.joint / self.count
    }
}

/// Terms of the conditional membership ratio for success count `h`
/// and a neighbor at normalised distance `r_prime`.
pub fn correlated_terms(r_prime: f64, h: usize, ctx: &CaptureContext, mc: McConfig) -> Result<CorrelatedTerms> {
    ctx.validate()?;
    let j = ctx.neighbors;
    if h > j {
        return Err(invalid("h_t", format!("{h} successes exceed {j} neighbors")));
    }
    let (p, jf, hi) = (ctx.p_t, j as f64, h as i64);
    let mut joint = 0.0;
    let mut count = 0.0;
    for n in h..=j {
        let weight = p.powi(n as i32) * (1.0 - p).powi((j - n) as i32);
        let ni = n as i64;
        let (zeta, gamma, xi) = if n == 0 {
            (0.0, 0.0, 1.0)
        } else {
            let f1 = f1n(r_prime, n, ctx.tau, &ctx.model, mc)?.value;
            let f2 = f2n(r_prime, n, ctx.tau, &ctx.model, mc)?.value;
            let f = capture_prob(n, ctx.tau, &ctx.model, mc)?.value;
            let zeta = binom_term(choose(ni - 1, hi - 1), f2, hi - 1, ni - hi) * f1;
            let gamma = binom_term(choose(ni - 1, hi), f2, hi, ni - hi - 1) * (1.0 - f1);
            let xi = binom_term(choose(ni, hi), f, hi, ni - hi);
            (zeta, gamma, xi)
        };
        joint += choose(j as i64 - 1, ni - 1) * weight * zeta;
        count += choose(j as i64, ni) * weight * ((n as f64 / jf) * (zeta + gamma - xi) + xi);
    }
    Ok(CorrelatedTerms { joint, count })
}

/// `c · f^a (1-f)^b`, zero whenever the coefficient is.
fn binom_term(c: f64, f: f64, a: i64, b: i64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * f.powi(a as i32) * (1.0 - f).powi(b as i32)
    }
}

/// Probability that a neighbor at normalised distance `r_prime` is among
/// the `h` nodes received in a slot.
pub fn conditional_membership(r_prime: f64, h: usize, ctx: &CaptureContext, mc: McConfig) -> Result<f64> {
    let terms = correlated_terms(r_prime, h, ctx, mc)?;
    if h == 0 {
        return Ok(0.0);
    }
    if h == ctx.neighbors {
        return Ok(1.0);
    }
    Ok(terms.ratio())
}

/// [`conditional_membership`] for two neighbors, unit threshold and the
/// simplified law with `h = 1`.
pub fn three_node_membership_closed_form(r_prime: f64, p_t: f64) -> f64 {
    let a = 1.0 - r_prime * r_prime;
    (1.0 - p_t + p_t * a * a) / (2.0 * (1.0 - p_t) + (a * a + r_prime.powi(4)) * p_t)
}
