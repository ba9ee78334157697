use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// First three cumulants of a counting distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cumulants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl Cumulants {
    /// (κ₂/κ₁, κ₃/κ₁), or `None` when κ₁ = 0.
    pub fn ratios(&self) -> Option<(f64, f64)> {
        (self.k1 != 0.0).then(|| (self.k2 / self.k1, self.k3 / self.k1))
    }

    /// Cumulants of 2·X given those of X: κ_q → 2^q κ_q.
    pub fn doubled(&self) -> Self {
        Cumulants {
            k1: 2.0 * self.k1,
            k2: 4.0 * self.k2,
            k3: 8.0 * self.k3,
        }
    }
}

/// Probability mass function over a non-negative count n.
///
/// `pmf[i]` is the probability of n = `offset + i`; counts outside the
/// stored window have probability zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinkDistribution {
    offset: usize,
    pmf: Vec<f64>,
    cumulants: Cumulants,
}

const NORMALIZATION_TOLERANCE: f64 = 1e-10;

impl KinkDistribution {
    pub fn new(offset: usize, pmf: Vec<f64>) -> Result<Self> {
        if pmf.is_empty() {
            return Err(Error::invalid("distribution", "empty pmf"));
        }
        if let Some(i) = pmf.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::invalid(
                "distribution",
                format!("probability of n = {} is {}", offset + i, pmf[i]),
            ));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::invalid("distribution", format!("probabilities sum to {total}")));
        }
        let cumulants = moment_cumulants(offset, &pmf);
        Ok(KinkDistribution { offset, pmf, cumulants })
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(offset: usize, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::invalid("distribution", format!("weights sum to {total}")));
        }
        Self::new(offset, weights.into_iter().map(|w| w / total).collect())
    }

    pub(crate) fn with_cumulants(mut self, cumulants: Cumulants) -> Self {
        self.cumulants = cumulants;
        self
    }

    /// Point mass at n.
    pub fn point_mass(n: usize) -> Self {
        Self::new(n, vec![1.0]).expect("valid")
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Largest n in the stored window.
    pub fn max_n(&self) -> usize {
        self.offset + self.pmf.len() - 1
    }

    pub fn prob(&self, n: usize) -> f64 {
        n.checked_sub(self.offset)
            .and_then(|i| self.pmf.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    /// Iterator over (n, P(n)) for the stored window.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.pmf.iter().enumerate().map(move |(i, &p)| (self.offset + i, p))
    }

    /// Cumulants attached to the distribution. Exact closed forms when the
    /// distribution came from [`super::pair_distribution`], moment sums
    /// otherwise.
    pub fn cumulants(&self) -> Cumulants {
        self.cumulants
    }

    /// Cumulants recomputed from the probabilities.
    pub fn moment_cumulants(&self) -> Cumulants {
        moment_cumulants(self.offset, &self.pmf)
    }

    pub fn mean(&self) -> f64 {
        self.moment_cumulants().k1
    }

    /// Drops leading and trailing zero-probability entries.
    pub fn trimmed(&self) -> Self {
        let first = self.pmf.iter().position(|&p| p > 0.0).unwrap_or(0);
        let last = self.pmf.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        KinkDistribution {
            offset: self.offset + first,
            pmf: self.pmf[first..=last].to_vec(),
            cumulants: self.cumulants,
        }
    }

    /// Distribution of `factor`·n, e.g. kinks from kink pairs with factor 2.
    pub fn scaled(&self, factor: usize) -> Self {
        assert!(factor >= 1);
        let mut pmf = vec![0.0; (self.pmf.len() - 1) * factor + 1];
        for (i, &p) in self.pmf.iter().enumerate() {
            pmf[i * factor] = p;
        }
        let f = factor as f64;
        let c = self.cumulants;
        KinkDistribution {
            offset: self.offset * factor,
            pmf,
            cumulants: Cumulants {
                k1: f * c.k1,
                k2: f * f * c.k2,
                k3: f * f * f * c.k3,
            },
        }
    }

    /// Both distributions on their common window `start..start + len`.
    pub fn aligned(&self, other: &Self) -> (usize, Vec<f64>, Vec<f64>) {
        let start = self.offset.min(other.offset);
        let end = self.max_n().max(other.max_n());
        let a = (start..=end).map(|n| self.prob(n)).collect();
        let b = (start..=end).map(|n| other.prob(n)).collect();
        (start, a, b)
    }
}

fn moment_cumulants(offset: usize, pmf: &[f64]) -> Cumulants {
    let mean_rel: f64 = pmf.iter().enumerate().map(|(i, p)| i as f64 * p).sum();
    let (mut m2, mut m3) = (0.0, 0.0);
    for (i, &p) in pmf.iter().enumerate() {
        let d = i as f64 - mean_rel;
        m2 += d * d * p;
        m3 += d * d * d * p;
    }
    Cumulants {
        k1: offset as f64 + mean_rel,
        k2: m2,
        k3: m3,
    }
}

/// Exact distribution of a sum of independent Bernoulli(p_k) variables
/// (Poisson binomial), by convolving one mode at a time.
///
/// Every term of the recurrence is non-negative, so the accumulation has no
/// cancellation. The attached cumulants are the closed forms Σp, Σp(1−p),
/// Σp(1−p)(1−2p).
pub fn pair_distribution(p: &[f64]) -> Result<KinkDistribution> {
    if let Some(bad) = p.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::domain(format!("mode probability {bad} outside [0, 1]")));
    }
    let mut pmf = Vec::with_capacity(p.len() + 1);
    pmf.push(1.0);
    for &pk in p {
        let q = 1.0 - pk;
        pmf.push(0.0);
        for n in (1..pmf.len()).rev() {
            pmf[n] = pmf[n] * q + pmf[n - 1] * pk;
        }
        pmf[0] *= q;
    }
    let dist = KinkDistribution::new(0, pmf)?;
    Ok(dist.with_cumulants(poisson_binomial_cumulants(p)))
}

/// Closed-form first three cumulants of a Poisson binomial distribution.
pub fn poisson_binomial_cumulants(p: &[f64]) -> Cumulants {
    p.iter().fold(Cumulants { k1: 0.0, k2: 0.0, k3: 0.0 }, |acc, &x| {
        let v = x * (1.0 - x);
        Cumulants {
            k1: acc.k1 + x,
            k2: acc.k2 + v,
            k3: acc.k3 + v * (1.0 - 2.0 * x),
        }
    })
}
