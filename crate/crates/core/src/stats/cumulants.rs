use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{seed, Error, Result};

pub const DEFAULT_RESAMPLES: usize = 1000;
const MIN_SAMPLES: usize = 10;
const MIN_RESAMPLES: usize = 100;

/// Point estimate with a 68% interval, `low ≤ point ≤ high`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub point: f64,
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.high - self.low)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantEstimate {
    pub k1: Interval,
    pub k2: Interval,
    pub k3: Interval,
    /// κ₂/κ₁ and κ₃/κ₁; absent when the sample mean is zero.
    pub ratio21: Option<Interval>,
    pub ratio31: Option<Interval>,
    pub n_samples: usize,
}

/// Sample mean and the unbiased k-statistics
///
/// ```text
/// k2 = n m2 / (n − 1)
/// k3 = n² m3 / ((n − 1)(n − 2))
/// ```
///
/// where m_r are the central sample moments.
pub fn k_statistics(counts: &[usize]) -> (f64, f64, f64) {
    let n = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    central_k(counts.iter().map(|&c| c as f64 - mean), n, mean)
}

fn central_k(devs: impl Iterator<Item = f64>, n: f64, mean: f64) -> (f64, f64, f64) {
    let (mut s2, mut s3) = (0.0, 0.0);
    for d in devs {
        s2 += d * d;
        s3 += d * d * d;
    }
    let (m2, m3) = (s2 / n, s3 / n);
    (mean, n * m2 / (n - 1.0), n * n * m3 / ((n - 1.0) * (n - 2.0)))
}

/// Cumulants of integer counts with percentile-bootstrap 68% intervals
/// (16th and 84th percentiles). Resample r uses the r-th split of `seed`,
/// so results do not depend on the thread count.
pub fn estimate_cumulants(counts: &[usize], resamples: usize, seed: u64) -> Result<CumulantEstimate> {
    if counts.len() < MIN_SAMPLES {
        return Err(Error::invalid(
            "cumulant estimate",
            format!("{} samples, at least {MIN_SAMPLES} required", counts.len()),
        ));
    }
    if resamples < MIN_RESAMPLES {
        return Err(Error::invalid(
            "cumulant estimate",
            format!("{resamples} bootstrap resamples, at least {MIN_RESAMPLES} required"),
        ));
    }
    let (k1, k2, k3) = k_statistics(counts);
    let n = counts.len();
    let boot: Vec<(f64, f64, f64)> = (0..resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = seed::rng(seed::split(seed, r as u64));
            let draw: Vec<f64> = (0..n).map(|_| counts[rng.random_range(0..n)] as f64).collect();
            let mean = draw.iter().sum::<f64>() / n as f64;
            central_k(draw.iter().map(|x| x - mean), n as f64, mean)
        })
        .collect();

    let interval = |point: f64, mut values: Vec<f64>| -> Interval {
        values.sort_by(f64::total_cmp);
        Interval {
            point,
            low: percentile(&values, 0.16).min(point),
            high: percentile(&values, 0.84).max(point),
        }
    };
    let ratio = |point: f64, pick: fn(&(f64, f64, f64)) -> f64| -> Option<Interval> {
        if k1 == 0.0 {
            return None;
        }
        let values: Vec<f64> = boot.iter().filter(|b| b.0 != 0.0).map(|b| pick(b) / b.0).collect();
        Some(interval(point / k1, values))
    };
    Ok(CumulantEstimate {
        k1: interval(k1, boot.iter().map(|b| b.0).collect()),
        k2: interval(k2.max(0.0), boot.iter().map(|b| b.1).collect()),
        k3: interval(k3, boot.iter().map(|b| b.2).collect()),
        ratio21: ratio(k2, |b| b.1),
        ratio31: ratio(k3, |b| b.2),
        n_samples: n,
    })
}

/// Linear interpolation between order statistics of a sorted slice.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Poisson};

    #[test]
    fn constant_counts() {
        let est = estimate_cumulants(&[7; 50], 200, 1).unwrap();
        assert_eq!(est.k1, Interval { point: 7.0, low: 7.0, high: 7.0 });
        assert_eq!((est.k2.point, est.k2.half_width()), (0.0, 0.0));
        assert_eq!((est.k3.point, est.k3.half_width()), (0.0, 0.0));
        assert_eq!(est.ratio21.unwrap().point, 0.0);
    }

    #[test]
    fn k_statistics_by_hand() {
        // mean 2, deviations (-2, -1, 3): m2 = 14/3, m3 = 18/3
        let (k1, k2, k3) = k_statistics(&[0, 1, 5]);
        assert_eq!(k1, 2.0);
        assert!((k2 - 7.0).abs() < 1e-12);
        assert!((k3 - 9.0 * 6.0 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn preconditions() {
        assert!(estimate_cumulants(&[1; 9], 1000, 0).is_err());
        assert!(estimate_cumulants(&[1; 20], 99, 0).is_err());
    }

    #[test]
    fn poisson_cumulants_coincide() {
        let lambda = 12.5;
        let mut rng = seed::rng(99);
        let pois = Poisson::new(lambda).unwrap();
        let counts: Vec<usize> = (0..100_000).map(|_| pois.sample(&mut rng) as usize).collect();
        let est = estimate_cumulants(&counts, 400, 3).unwrap();
        for (name, iv) in [("k1", est.k1), ("k2", est.k2), ("k3", est.k3)] {
            assert!(
                (iv.point - lambda).abs() < 3.0 * iv.half_width(),
                "{name}: {iv:?}"
            );
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let counts: Vec<usize> = (0..300).map(|i| (i * 7919) % 23).collect();
        assert_eq!(
            estimate_cumulants(&counts, 150, 11).unwrap(),
            estimate_cumulants(&counts, 150, 11).unwrap()
        );
        assert_ne!(
            estimate_cumulants(&counts, 150, 11).unwrap().k2,
            estimate_cumulants(&counts, 150, 12).unwrap().k2
        );
    }

    #[test]
    fn interval_width_scales_as_inverse_sqrt_n() {
        let pois = Poisson::new(20.0).unwrap();
        let mut rng = seed::rng(4);
        let big: Vec<usize> = (0..8000).map(|_| pois.sample(&mut rng) as usize).collect();
        let small = &big[..2000];
        let w_small = estimate_cumulants(small, 2000, 5).unwrap();
        let w_big = estimate_cumulants(&big, 2000, 5).unwrap();
        for (a, b) in [(w_small.k1, w_big.k1), (w_small.k2, w_big.k2)] {
            let ratio = b.half_width() / a.half_width();
            assert!((0.4..=0.6).contains(&ratio), "ratio {ratio}");
        }
    }
}
