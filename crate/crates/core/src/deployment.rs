//! Node placement in a disk.
//!
//! Nodes are uniform over a disk centred on a reference node. Radius is
//! drawn by inverting the distance CDF `F(r) = (r/R)²`, so each node costs
//! exactly two uniform draws.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::{stream_rng, Stream};

/// A disk of radius `radius_m` centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskRegion {
    radius_m: f64,
}

impl DiskRegion {
    pub fn new(radius_m: f64) -> Result<Self> {
        if !(radius_m > 0.0 && radius_m.is_finite()) {
            return Err(invalid("radius_m", format!("must be positive, got {radius_m}")));
        }
        Ok(Self { radius_m })
    }

    pub fn radius(&self) -> f64 {
        self.radius_m
    }

    pub fn area(&self) -> f64 {
        PI * self.radius_m * self.radius_m
    }
}

/// Node positions; index 0 is the reference node at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Deployment {
    pub seed: u64,
    pub radius_m: f64,
    pub positions: Vec<[f64; 2]>,
}

impl Deployment {
    /// Build a deployment from explicit neighbor distances, placing the
    /// neighbors along the positive x-axis. Mostly useful for fixtures.
    pub fn from_distances(radius_m: f64, distances: &[f64]) -> Self {
        let mut positions = vec![[0.0, 0.0]];
        positions.extend(distances.iter().map(|&d| [d, 0.0]));
        Self {
            seed: 0,
            radius_m,
            positions,
        }
    }

    /// Number of nodes other than the reference.
    pub fn neighbor_count(&self) -> usize {
        self.positions.len().saturating_sub(1)
    }

    /// Distance from node `index` to the reference node.
    pub fn distance(&self, index: usize) -> f64 {
        let [x, y] = self.positions[index];
        x.hypot(y)
    }

    /// Distances from every non-reference node to the reference, in index order.
    pub fn neighbor_distances(&self) -> Vec<f64> {
        (1..self.positions.len()).map(|i| self.distance(i)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("deployment serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// `n` nodes i.i.d. uniform over `region`, plus the reference node at index 0.
pub fn sample_uniform_disk(n: usize, region: DiskRegion, seed: u64) -> Deployment {
    let mut rng = stream_rng(seed, Stream::Deployment, 0);
    let mut positions = Vec::with_capacity(n + 1);
    positions.push([0.0, 0.0]);
    for _ in 0..n {
        let u: f64 = rng.random();
        let theta: f64 = rng.random::<f64>() * 2.0 * PI;
        let r = region.radius() * u.sqrt();
        positions.push([r * theta.cos(), r * theta.sin()]);
    }
    Deployment {
        seed,
        radius_m: region.radius(),
        positions,
    }
}

/// Node count of a homogeneous Poisson field restricted to `region`.
pub fn sample_poisson_count(intensity: f64, region: DiskRegion, seed: u64) -> Result<usize> {
    if !(intensity >= 0.0 && intensity.is_finite()) {
        return Err(invalid("intensity", format!("must be non-negative, got {intensity}")));
    }
    let mean = intensity * region.area();
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| invalid("intensity", e.to_string()))?;
    let mut rng = stream_rng(seed, Stream::Deployment, 1);
    Ok(dist.sample(&mut rng) as usize)
}

/// A Poisson field: Poisson node count, then uniform placement.
pub fn sample_poisson_field(intensity: f64, region: DiskRegion, seed: u64) -> Result<Deployment> {
    let n = sample_poisson_count(intensity, region, seed)?;
    Ok(sample_uniform_disk(n, region, seed))
}

/// CDF of the distance from the centre to a uniform point in the disk.
pub fn distance_cdf(x: f64, region: DiskRegion) -> f64 {
    if x < 0.0 {
        0.0
    } else if x <= region.radius() {
        (x / region.radius()).powi(2)
    } else {
        1.0
    }
}

/// Inverse of [`distance_cdf`].
pub fn distance_quantile(u: f64, region: DiskRegion) -> f64 {
    region.radius() * u.clamp(0.0, 1.0).sqrt()
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
