//! Finite random-set statistics over a discrete universe {1, …, K}.
//!
//! Set functions are stored as power-set tables indexed by bitmask: element
//! `i` of the universe occupies bit `i - 1`. The belief mass
//! `β(C) = Pr{X ⊆ C}` and the set density `f(B) = Pr{X = B}` are related by
//! the zeta transform over the subset lattice and its Möbius inverse.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::stats::choose;

/// Largest universe for which power-set tables are built.
pub const MAX_UNIVERSE: usize = 20;

/// A finite set of node identifiers drawn from {1, …, 64}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct NodeSet(u64);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn from_mask(mask: u64) -> Self {
        NodeSet(mask)
    }

    /// The full universe {1, …, k}.
    pub fn universe(k: usize) -> Self {
        assert!(k <= 64);
        if k == 64 {
            NodeSet(u64::MAX)
        } else {
            NodeSet((1u64 << k) - 1)
        }
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn insert(&mut self, id: u32) {
        assert!((1..=64).contains(&id), "node id {id} out of range");
        self.0 |= 1 << (id - 1);
    }

    pub fn remove(&mut self, id: u32) {
        if (1..=64).contains(&id) {
            self.0 &= !(1 << (id - 1));
        }
    }

    pub fn contains(self, id: u32) -> bool {
        (1..=64).contains(&id) && self.0 & (1 << (id - 1)) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & other.0)
    }

    pub fn difference(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & !other.0)
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = u32> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let b = m.trailing_zeros();
                m &= m - 1;
                Some(b + 1)
            }
        })
    }
}

impl FromIterator<u32> for NodeSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        let mut s = NodeSet::EMPTY;
        for id in iter {
            s.insert(id);
        }
        s
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for NodeSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for NodeSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let ids = Vec::<u32>::deserialize(d)?;
        if let Some(bad) = ids.iter().find(|&&id| !(1..=64).contains(&id)) {
            return Err(serde::de::Error::custom(format!("node id {bad} out of range")));
        }
        Ok(ids.into_iter().collect())
    }
}

/// A real-valued function on every subset of {1, …, K}.
#[derive(Debug, Clone, PartialEq)]
pub struct SetFunction {
    universe: usize,
    table: Vec<f64>,
}

impl SetFunction {
    pub fn new(universe: usize, table: Vec<f64>) -> Result<Self> {
        if universe > MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge(universe));
        }
        if table.len() != 1 << universe {
            return Err(invalid(
                "table",
                format!("expected {} entries, got {}", 1usize << universe, table.len()),
            ));
        }
        Ok(Self { universe, table })
    }

    pub fn from_fn(universe: usize, f: impl Fn(NodeSet) -> f64) -> Result<Self> {
        if universe > MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge(universe));
        }
        let table = (0..1u64 << universe).map(|m| f(NodeSet::from_mask(m))).collect();
        Ok(Self { universe, table })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn get(&self, set: NodeSet) -> f64 {
        self.table[set.mask() as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.table
    }
}

impl Serialize for SetFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(self.table.iter().enumerate().map(|(m, v)| (m.to_string(), v)))
    }
}

impl<'de> Deserialize<'de> for SetFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = BTreeMap::<String, f64>::deserialize(d)?;
        let mut entries = Vec::with_capacity(raw.len());
        for (k, v) in raw {
            let m: usize = k
                .parse()
                .map_err(|_| D::Error::custom(format!("bad bitmask key `{k}`")))?;
            entries.push((m, v));
        }
        entries.sort_by_key(|e| e.0);
        let n = entries.len();
        if !n.is_power_of_two() || entries.iter().enumerate().any(|(i, e)| e.0 != i) {
            return Err(D::Error::custom("keys must cover every bitmask 0..2^K"));
        }
        SetFunction::new(n.trailing_zeros() as usize, entries.into_iter().map(|e| e.1).collect())
            .map_err(D::Error::custom)
    }
}

const NORMALIZATION_TOL: f64 = 1e-12;

/// `β(C) = Σ_{B ⊆ C} f(B)` for a set probability mass function `f`.
pub fn belief_mass_from_pmf(pmf: &SetFunction) -> Result<SetFunction> {
    if let Some(v) = pmf.table.iter().find(|v| !(**v >= 0.0)) {
        return Err(invalid("pmf", format!("negative or NaN mass {v}")));
    }
    let total: f64 = pmf.table.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(total));
    }
    let mut t = pmf.table.clone();
    for bit in 0..pmf.universe {
        let b = 1 << bit;
        for m in 0..t.len() {
            if m & b != 0 {
                t[m] += t[m ^ b];
            }
        }
    }
    Ok(SetFunction {
        universe: pmf.universe,
        table: t,
    })
}

/// `f(B) = Σ_{C ⊆ B} (-1)^{|B \ C|} β(C)`.
pub fn mobius_inverse(beta: &SetFunction) -> SetFunction {
    let mut t = beta.table.clone();
    for bit in 0..beta.universe {
        let b = 1 << bit;
        for m in 0..t.len() {
            if m & b != 0 {
                t[m] -= t[m ^ b];
            }
        }
    }
    SetFunction {
        universe: beta.universe,
        table: t,
    }
}

/// Belief mass of the transmitter set given `j_prime` neighbors, each
/// transmitting independently with probability `p_t`.
pub fn membership_belief_mass(c: NodeSet, j_prime: usize, p_t: f64) -> f64 {
    let size = c.len() as i64;
    (0..=j_prime)
        .map(|n| choose(size, n as i64) * p_t.powi(n as i32) * (1.0 - p_t).powi((j_prime - n) as i32))
        .sum()
}

/// Set density of the transmitter set: `p^|X| (1-p)^(J'-|X|)` when
/// `|X| ≤ J'`, zero otherwise.
pub fn membership_density(x: NodeSet, j_prime: usize, p_t: f64) -> f64 {
    let n = x.len();
    if n > j_prime {
        return 0.0;
    }
    p_t.powi(n as i32) * (1.0 - p_t).powi((j_prime - n) as i32)
}

/// `ln` of [`membership_density`], `-inf` where the density vanishes.
pub fn ln_membership_density(x: NodeSet, j_prime: usize, p_t: f64) -> f64 {
    let n = x.len();
    if n > j_prime {
        return f64::NEG_INFINITY;
    }
    let k = (j_prime - n) as f64;
    xlogy(n as f64, p_t) + xlogy(k, 1.0 - p_t)
}

// x·ln(y) with 0·ln(0) = 0
fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// Prior on the number of neighbors inside the discovery region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CardinalityPrior {
    /// Poisson with mean `λπR₀²`.
    Poisson { mean: f64 },
    /// Binomial(K, R₀²/R²) for K nodes uniform in a disk of radius R.
    Binomial { trials: usize, prob: f64 },
}

impl CardinalityPrior {
    pub fn poisson(intensity: f64, discovery_radius: f64) -> Self {
        CardinalityPrior::Poisson {
            mean: intensity * std::f64::consts::PI * discovery_radius * discovery_radius,
        }
    }

    /// Binomial prior for `nodes` placed uniformly in a disk of radius
    /// `region_radius`, counted inside radius `discovery_radius`.
    pub fn binomial(nodes: usize, discovery_radius: f64, region_radius: f64) -> Self {
        let p = (discovery_radius / region_radius).powi(2).min(1.0);
        CardinalityPrior::Binomial { trials: nodes, prob: p }
    }

    pub fn pmf(&self, j: usize) -> f64 {
        self.ln_pmf(j).exp()
    }

    pub fn ln_pmf(&self, j: usize) -> f64 {
        match *self {
            CardinalityPrior::Poisson { mean } => {
                if mean == 0.0 {
                    return if j == 0 { 0.0 } else { f64::NEG_INFINITY };
                }
                let ln_fact: f64 = (2..=j).map(|i| (i as f64).ln()).sum();
                j as f64 * mean.ln() - mean - ln_fact
            }
            CardinalityPrior::Binomial { trials, prob } => {
                if j > trials {
                    return f64::NEG_INFINITY;
                }
                let c = choose(trials as i64, j as i64).ln();
                c + xlogy(j as f64, prob) + xlogy((trials - j) as f64, 1.0 - prob)
            }
        }
    }

    /// Largest cardinality with non-zero prior mass, or for Poisson the
    /// smallest `j` beyond the mean whose upper tail is below `tail`.
    pub fn support_max(&self, tail: f64) -> usize {
        match *self {
            CardinalityPrior::Binomial { trials, .. } => trials,
            CardinalityPrior::Poisson { mean } => {
                let mut cdf = 0.0;
                let mut j = 0;
                loop {
                    cdf += self.pmf(j);
                    if 1.0 - cdf < tail && j as f64 >= mean {
                        return j;
                    }
                    j += 1;
                }
            }
        }
    }
}
