//! Small numerical helpers shared by the analysis and simulation code.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Binomial coefficient C(n, k) as `f64`; zero outside 0 ≤ k ≤ n.
pub fn choose(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Numerically stable `ln(Σ exp(v))`; `-inf` for an empty slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Streaming log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }
}

impl LogSumExp {
    #[inline]
    pub fn push(&mut self, v: f64) {
        if v <= self.max {
            let d = v - self.max;
            // exp underflows to zero below this
            if d > -745.0 {
                self.sum += d.exp();
            }
        } else {
            self.sum = self.sum * (self.max - v).exp() + 1.0;
            self.max = v;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_err: 0.0 }
    }

    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        if samples.is_empty() {
            return Self {
                value: f64::NAN,
                std_err: f64::NAN,
            };
        }
        let mean = samples.iter().sum::<f64>() / n;
        if samples.len() < 2 {
            return Self {
                value: mean,
                std_err: 0.0,
            };
        }
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Self {
            value: mean,
            std_err: (var / n).sqrt(),
        }
    }

    /// True when `target` lies within `k` standard errors (plus `slack`).
    pub fn agrees_with(&self, target: f64, k: f64, slack: f64) -> bool {
        (self.value - target).abs() <= k * self.std_err + slack
    }
}

/// One-sided paired t-test of `mean(a - b) < 0`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairedTest {
    pub mean_diff: f64,
    pub std_err: f64,
    pub t: f64,
    pub p_value: f64,
}

pub fn paired_t_less(a: &[f64], b: &[f64]) -> PairedTest {
    assert_eq!(a.len(), b.len(), "paired samples must have equal length");
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let est = Estimate::from_samples(&diffs);
    let df = (diffs.len().max(2) - 1) as f64;
    let (t, p_value) = if est.std_err > 0.0 {
        let t = est.value / est.std_err;
        let dist = StudentsT::new(0.0, 1.0, df).expect("valid t distribution");
        (t, dist.cdf(t))
    } else if est.value < 0.0 {
        (f64::NEG_INFINITY, 0.0)
    } else {
        (f64::INFINITY, 1.0)
    };
    PairedTest {
        mean_diff: est.value,
        std_err: est.std_err,
        t,
        p_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn choose_values() {
        assert_eq!(choose(5, 2), 10.0);
        assert_eq!(choose(8, 0), 1.0);
        assert_eq!(choose(3, 4), 0.0);
        assert_eq!(choose(-1, 0), 0.0);
        assert_eq!(choose(4, -1), 0.0);
        assert_eq!(choose(30, 15), 155_117_520.0);
    }

    #[test]
    fn streaming_lse_matches_batch() {
        let v = [-1000.0, -3.0, 2.5, -800.0, 2.0, 0.0];
        let mut acc = LogSumExp::default();
        v.iter().for_each(|&x| acc.push(x));
        assert!((acc.value() - log_sum_exp(&v)).abs() < 1e-12);
        assert_eq!(LogSumExp::default().value(), f64::NEG_INFINITY);
    }

    #[test]
    fn paired_test_detects_shift() {
        let a: Vec<f64> = (0..50).map(|i| (i % 5) as f64).collect();
        let b: Vec<f64> = a
            .iter()
            .enumerate()
            .map(|(i, x)| x + 1.0 + (i % 3) as f64 * 0.1)
            .collect();
        let t = paired_t_less(&a, &b);
        assert!(t.p_value < 1e-6);
        let same = paired_t_less(&a, &a);
        assert_eq!(same.p_value, 1.0);
    }
}
