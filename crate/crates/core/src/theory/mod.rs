//! Exact closed-system theory of kink formation in the transverse-field
//! Ising chain.
//!
//! Under periodic boundaries the chain decouples into independent momentum
//! modes. Each mode is excited with Landau-Zener probability
//! p_k = exp(−2π τ k²), where τ = J t_a / ħ is the dimensionless quench time,
//! so the number of kink pairs is Poisson-binomial and the kink number is
//! twice that. [`exact_mode_dynamics`] integrates the two-level problem of
//! every mode directly as an independent check of the Landau-Zener limit.

mod distribution;
mod dynamics;

use std::f64::consts::{PI, SQRT_2};
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

pub use distribution::{pair_distribution, poisson_binomial_cumulants, Cumulants, KinkDistribution};
pub use dynamics::{
    exact_mode_dynamics, evolve_modes, sudden_quench_probability, ModeDynamics, QuenchMapping,
    CONVERGENCE_TOLERANCE,
};

use crate::{Error, Result};

/// Asymptotic κ₂/κ₁ = 2 − √2.
pub const KAPPA2_OVER_KAPPA1: f64 = 2.0 - SQRT_2;

/// Asymptotic κ₃/κ₁ = 4 − 12/√2 + 8/√3.
pub fn kappa3_over_kappa1() -> f64 {
    4.0 - 12.0 / SQRT_2 + 8.0 / 3f64.sqrt()
}

/// Periodic chain of even length L quenched with dimensionless time τ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchParams {
    length: usize,
    tau: f64,
}

impl QuenchParams {
    pub fn new(length: usize, tau: f64) -> Result<Self> {
        if length < 4 || !length.is_multiple_of(2) {
            return Err(Error::invalid("quench", format!("L = {length} must be even and at least 4")));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::invalid("quench", format!("tau = {tau} must be positive")));
        }
        Ok(QuenchParams { length, tau })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Positive momenta k_m = π(2m + 1)/L, m = 0..L/2 − 1.
    pub fn momenta(&self) -> Vec<f64> {
        mode_momenta(self.length)
    }
}

pub fn mode_momenta(length: usize) -> Vec<f64> {
    let l = length as f64;
    (0..length / 2).map(|m| PI * (2 * m + 1) as f64 / l).collect()
}

/// Landau-Zener excitation probability exp(−2π τ k²) of every positive mode.
pub fn mode_probabilities(q: &QuenchParams) -> Vec<f64> {
    q.momenta()
        .into_iter()
        .map(|k| landau_zener(q.tau, k))
        .collect()
}

pub fn landau_zener(tau: f64, k: f64) -> f64 {
    (-2.0 * PI * tau * k * k).exp()
}

/// Kink-number cumulants κ_q = 2^q κ̃_q from the pair cumulants.
pub fn kink_cumulants(q: &QuenchParams) -> Cumulants {
    poisson_binomial_cumulants(&mode_probabilities(q)).doubled()
}

/// Exact kink-number distribution; supported on even n only.
pub fn kink_distribution(q: &QuenchParams) -> Result<KinkDistribution> {
    Ok(pair_distribution(&mode_probabilities(q))?.scaled(2))
}

/// Long-time mean kink number (L/2π)·√(1/(2τ)).
pub fn asymptotic_mean_kinks(q: &QuenchParams) -> f64 {
    q.length as f64 / (2.0 * PI) * (1.0 / (2.0 * q.tau)).sqrt()
}

/// Kibble-Zurek density exponent dν/(1 + zν).
pub fn kzm_exponent(d: u32, nu: f64, z: f64) -> Result<f64> {
    if d == 0 || !(nu > 0.0) || !(z > 0.0) {
        return Err(Error::domain(format!("invalid critical exponents d={d}, nu={nu}, z={z}")));
    }
    Ok(d as f64 * nu / (1.0 + z * nu))
}

/// Unnormalized Gaussian density with variance (2 − √2)·mean.
pub fn gaussian_density(mean: f64, n: f64) -> f64 {
    let var = KAPPA2_OVER_KAPPA1 * mean;
    (-(n - mean).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Gaussian kink distribution evaluated at every integer of `range` and
/// renormalized over it.
pub fn gaussian_pmf(mean: f64, range: RangeInclusive<usize>) -> Result<KinkDistribution> {
    gaussian_pmf_lattice(mean, range, 1)
}

/// Gaussian kink distribution evaluated on `start, start + stride, …` and
/// renormalized there; other counts get probability zero. With stride 2 and
/// an even start this is the comparison distribution for periodic chains,
/// whose kink number is always even.
pub fn gaussian_pmf_lattice(mean: f64, range: RangeInclusive<usize>, stride: usize) -> Result<KinkDistribution> {
    if !(mean.is_finite() && mean > 0.0) {
        return Err(Error::domain(format!("Gaussian mean {mean} must be positive")));
    }
    if stride == 0 || range.is_empty() {
        return Err(Error::invalid("gaussian range", "empty range or zero stride"));
    }
    let (start, end) = (*range.start(), *range.end());
    let weights = (start..=end)
        .map(|n| {
            if (n - start) % stride == 0 {
                gaussian_density(mean, n as f64)
            } else {
                0.0
            }
        })
        .collect();
    KinkDistribution::from_weights(start, weights)
}
