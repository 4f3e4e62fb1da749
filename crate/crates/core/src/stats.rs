//! Monte Carlo estimation and empirical-distribution comparison.
//!
//! Replications are evaluated on per-index keyed streams and collected in
//! index order; sums are pairwise, so an estimate is bit-identical for a
//! given (seed, reps) no matter how the work was partitioned over threads.

use serde::Serialize;

use crate::exec::{run_indexed, Parallelism};
use crate::rng::StreamKey;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub reps: u64,
    pub target: Option<f64>,
    /// `(mean - target) / std_error` when a target is set.
    pub z_score: Option<f64>,
}

impl Estimate {
    /// |z| <= k, treating an exact hit with zero spread as a pass.
    pub fn within(&self, k_sigma: f64) -> bool {
        self.z_score.map_or(true, |z| z.abs() <= k_sigma)
    }
}

/// Pairwise (cascade) summation; deterministic and accurate for large arrays.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Mean and standard error of recorded samples, optionally scored against a
/// target.
pub fn estimate_from_samples(values: &[f64], target: Option<f64>) -> Estimate {
    assert!(values.len() >= 2, "need at least two replications");
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let std_error = (pairwise_sum(&sq) / (n - 1.0) / n).sqrt();
    let z_score = target.map(|t| {
        if std_error > 0.0 {
            (mean - t) / std_error
        } else if mean == t {
            0.0
        } else {
            f64::INFINITY * (mean - t).signum()
        }
    });
    Estimate {
        mean,
        std_error,
        reps: values.len() as u64,
        target,
        z_score,
    }
}

/// Run `reps` independent replications of `generator`, one derived stream
/// key each, and summarise.
pub fn mc_estimate<F>(
    reps: u64,
    seed: u64,
    parallelism: Parallelism,
    target: Option<f64>,
    generator: F,
) -> Estimate
where
    F: Fn(StreamKey) -> f64 + Sync,
{
    let values = mc_samples(reps, seed, parallelism, generator);
    estimate_from_samples(&values, target)
}

/// The raw replication values, in replication order.
pub fn mc_samples<F>(reps: u64, seed: u64, parallelism: Parallelism, generator: F) -> Vec<f64>
where
    F: Fn(StreamKey) -> f64 + Sync,
{
    run_indexed(reps, parallelism, |r| {
        generator(StreamKey::replication(seed, r))
    })
}

/// Two-sample Kolmogorov-Smirnov statistic: the sup distance between the
/// empirical distribution functions.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "KS needs nonempty samples");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    let (n, m) = (a.len() as f64, b.len() as f64);
    let mut i = 0usize;
    let mut j = 0usize;
    let mut d: f64 = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// 1% critical value of the two-sample KS statistic,
/// `1.628 * sqrt((n + m) / (n m))`.
pub fn ks_critical_1pct(n: usize, m: usize) -> f64 {
    1.628 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}
