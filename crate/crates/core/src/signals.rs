//! Signature sequences and chip-level received vectors.
//!
//! Each node spreads a known one-bit pilot with its signature, so the
//! transmitted chip vector is the signature itself. Signatures are cyclic
//! shifts of one maximal-length LFSR sequence mapped to ±1 chips; distinct
//! shifts have cross-correlation −1 and each has autocorrelation L.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::Fading;
use crate::error::{invalid, Error, Result};
use crate::rfs::NodeSet;
use crate::rng::{stream_rng, Stream};

/// `x⁴ + x + 1`, the default degree-4 primitive polynomial.
pub const DEFAULT_POLY: u32 = 0b1_0011;
pub const DEFAULT_REGISTER_LEN: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSignature")]
pub struct Signature {
    pub node_id: u32,
    chips: Vec<i8>,
}

#[derive(Deserialize)]
struct RawSignature {
    node_id: u32,
    chips: Vec<i8>,
}

impl TryFrom<RawSignature> for Signature {
    type Error = Error;

    fn try_from(raw: RawSignature) -> Result<Self> {
        Signature::new(raw.node_id, raw.chips)
    }
}

impl Signature {
    pub fn new(node_id: u32, chips: Vec<i8>) -> Result<Self> {
        if chips.iter().any(|c| *c != 1 && *c != -1) {
            return Err(invalid("chips", "entries must be ±1"));
        }
        Ok(Self { node_id, chips })
    }

    pub fn chips(&self) -> &[i8] {
        &self.chips
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.chips.iter().map(|&c| c as f64).collect()
    }

    pub fn dot(&self, other: &Signature) -> i32 {
        self.chips
            .iter()
            .zip(&other.chips)
            .map(|(a, b)| (*a as i32) * (*b as i32))
            .sum()
    }
}

/// One period of the m-sequence of the given feedback polynomial, as ±1
/// chips (bit 1 ↦ +1), rotated left by `shift`.
///
/// `poly` holds the polynomial coefficients as bits, `x^register_len`
/// included: `x⁴ + x + 1` is `0b10011`.
pub fn msequence(register_len: u32, poly: u32, shift: usize) -> Result<Vec<i8>> {
    if !(2..=24).contains(&register_len) {
        return Err(invalid(
            "register_len",
            format!("must be in 2..=24, got {register_len}"),
        ));
    }
    let expected = (1usize << register_len) - 1;
    if poly >> register_len != 1 || poly & 1 == 0 {
        return Err(Error::NotPrimitive {
            poly,
            period: 0,
            expected,
        });
    }
    let taps = poly & ((1 << register_len) - 1);
    // state bit i holds a_{n+i}; a_{n+m} = parity(taps & state)
    let start: u32 = 1;
    let mut state = start;
    let mut bits = Vec::with_capacity(expected);
    loop {
        bits.push((state & 1) as u8);
        let fb = (state & taps).count_ones() & 1;
        state = (state >> 1) | (fb << (register_len - 1));
        if state == start || bits.len() > expected {
            break;
        }
    }
    if bits.len() != expected {
        return Err(Error::NotPrimitive {
            poly,
            period: bits.len(),
            expected,
        });
    }
    let n = bits.len();
    Ok((0..n)
        .map(|i| if bits[(i + shift) % n] == 1 { 1 } else { -1 })
        .collect())
}

/// Give nodes `1..=count` distinct cyclic shifts `0..count` of one m-sequence.
pub fn assign_signatures(count: usize, register_len: u32, poly: u32) -> Result<Vec<Signature>> {
    let base = msequence(register_len, poly, 0)?;
    let n = base.len();
    if count > n {
        return Err(invalid(
            "count",
            format!("{count} nodes but only {n} distinct shifts of a length-{n} sequence"),
        ));
    }
    Ok((0..count)
        .map(|k| Signature {
            node_id: k as u32 + 1,
            chips: (0..n).map(|i| base[(i + k) % n]).collect(),
        })
        .collect())
}

/// Default signature family: length-15 shifts of `x⁴ + x + 1`.
pub fn default_signatures(count: usize) -> Result<Vec<Signature>> {
    assign_signatures(count, DEFAULT_REGISTER_LEN, DEFAULT_POLY)
}

/// Cyclic autocorrelation of a ±1 sequence at lag `lag`.
pub fn cyclic_autocorrelation(chips: &[i8], lag: usize) -> i32 {
    let n = chips.len();
    (0..n).map(|i| chips[i] as i32 * chips[(i + lag) % n] as i32).sum()
}

/// Signatures as CSV: `node,chip1,…,chipL`.
pub fn signatures_csv(sigs: &[Signature]) -> String {
    let len = sigs.first().map_or(0, Signature::len);
    let mut out = String::from("node");
    for i in 1..=len {
        let _ = write!(out, ",chip{i}");
    }
    out.push('\n');
    for s in sigs {
        let _ = write!(out, "{}", s.node_id);
        for c in &s.chips {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
    }
    out
}

/// Chip samples observed by a listening node in one slot.
#[derive(Debug, Clone, PartialEq)]
pub enum ReceivedVector {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl ReceivedVector {
    pub fn len(&self) -> usize {
        match self {
            ReceivedVector::Real(v) => v.len(),
            ReceivedVector::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            ReceivedVector::Real(v) => Some(v),
            ReceivedVector::Complex(_) => None,
        }
    }

    /// Real part of `⟨y, s⟩`.
    pub fn correlate(&self, sig: &Signature) -> f64 {
        match self {
            ReceivedVector::Real(v) => v.iter().zip(sig.chips()).map(|(y, &c)| y * c as f64).sum(),
            ReceivedVector::Complex(v) => v.iter().zip(sig.chips()).map(|(y, &c)| y.re * c as f64).sum(),
        }
    }
}

/// `y = Σ_{k ∈ transmitters} g_k s_k + n` with white Gaussian noise of power
/// `noise_power` per chip (split evenly over I and Q for complex baseband).
pub fn synthesize(
    transmitters: NodeSet,
    amplitudes: &BTreeMap<u32, Complex64>,
    signatures: &[Signature],
    noise_power: f64,
    baseband: Fading,
    seed: u64,
) -> Result<ReceivedVector> {
    if !(noise_power >= 0.0) {
        return Err(invalid("noise_power", "must be non-negative"));
    }
    let len = signatures.first().map_or(0, Signature::len);
    let mut acc = vec![Complex64::new(0.0, 0.0); len];
    for id in transmitters.iter() {
        let g = *amplitudes.get(&id).ok_or(Error::MissingNode(id))?;
        let sig = signatures
            .iter()
            .find(|s| s.node_id == id)
            .ok_or(Error::MissingNode(id))?;
        if sig.len() != len {
            return Err(invalid("signatures", "all signatures must have the same length"));
        }
        for (a, &c) in acc.iter_mut().zip(sig.chips()) {
            *a += g * c as f64;
        }
    }
    let mut rng = stream_rng(seed, Stream::Noise, 0);
    Ok(match baseband {
        Fading::None => {
            let sd = noise_power.sqrt();
            ReceivedVector::Real(
                acc.iter()
                    .map(|a| {
                        let n: f64 = rng.sample(StandardNormal);
                        a.re + sd * n
                    })
                    .collect(),
            )
        }
        Fading::Rayleigh => {
            let sd = (noise_power / 2.0).sqrt();
            ReceivedVector::Complex(
                acc.iter()
                    .map(|a| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        a + Complex64::new(sd * re, sd * im)
                    })
                    .collect(),
            )
        }
    })
}
