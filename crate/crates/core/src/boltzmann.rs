//! Classical Boltzmann model of the kink number of a free-boundary chain.
//!
//! With L − 1 bonds, n of them frustrated, the classical energy is
//! proportional to 2n + 1 − L and the degeneracy is C(L − 1, n), so
//!
//! ```text
//! Q(n; β′) = C(L−1, n) e^{−β′(2n+1−L)} / (2 cosh β′)^{L−1}
//! ```
//!
//! and the mean kink density is (1 − 1/L) / (1 + e^{2β′}).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::optimize::{bracket_minimum, golden_section};
use crate::stats::tv_distance;
use crate::theory::KinkDistribution;
use crate::units::Device;
use crate::{Error, Result};

/// Tolerance on β′ for both minimizations.
pub const BETA_TOLERANCE: f64 = 1e-10;
const MAX_EXPANSIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoltzmannModel {
    pub length: usize,
    pub beta_prime: f64,
}

impl BoltzmannModel {
    pub fn new(length: usize, beta_prime: f64) -> Result<Self> {
        check_length(length)?;
        if !beta_prime.is_finite() {
            return Err(Error::domain(format!("beta' = {beta_prime} is not finite")));
        }
        Ok(BoltzmannModel { length, beta_prime })
    }

    pub fn pmf(&self) -> KinkDistribution {
        boltzmann_pmf(self.length, self.beta_prime).expect("validated at construction")
    }

    pub fn density(&self) -> f64 {
        boltzmann_density(self.length, self.beta_prime)
    }

    /// Effective temperature 1/β′ in units of the device coupling and in
    /// kelvin.
    pub fn effective_temperature(&self, device: &Device) -> EffectiveTemperature {
        EffectiveTemperature {
            beta_prime: self.beta_prime,
            reduced: 1.0 / self.beta_prime,
            kelvin: device.effective_temperature_k(self.beta_prime),
            device: device.name.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveTemperature {
    pub beta_prime: f64,
    /// 1/β′.
    pub reduced: f64,
    pub kelvin: f64,
    pub device: String,
}

fn check_length(length: usize) -> Result<()> {
    if length < 2 {
        return Err(Error::invalid("Boltzmann model", format!("L = {length} must be at least 2")));
    }
    Ok(())
}

/// ln(2 cosh x) without overflow.
fn ln_two_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// ln C(m, n) for n = 0..=m.
fn ln_binomials(m: usize) -> Vec<f64> {
    let mut ln_fact = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    ln_fact.push(0.0);
    for k in 1..=m {
        acc += (k as f64).ln();
        ln_fact.push(acc);
    }
    (0..=m).map(|n| ln_fact[m] - ln_fact[n] - ln_fact[m - n]).collect()
}

fn log_pmf_with(ln_binom: &[f64], beta: f64) -> Vec<f64> {
    let bonds = ln_binom.len() - 1;
    let l = (bonds + 1) as f64;
    let norm = bonds as f64 * ln_two_cosh(beta);
    ln_binom
        .iter()
        .enumerate()
        .map(|(n, lb)| lb - beta * (2.0 * n as f64 + 1.0 - l) - norm)
        .collect()
}

/// ln Q(n; β′) for n = 0..L−1.
pub fn boltzmann_log_pmf(length: usize, beta_prime: f64) -> Result<Vec<f64>> {
    check_length(length)?;
    Ok(log_pmf_with(&ln_binomials(length - 1), beta_prime))
}

pub fn boltzmann_pmf(length: usize, beta_prime: f64) -> Result<KinkDistribution> {
    let log = boltzmann_log_pmf(length, beta_prime)?;
    KinkDistribution::from_weights(0, log.into_iter().map(f64::exp).collect())
}

/// Mean kink density (1 − 1/L)/(1 + e^{2β′}).
pub fn boltzmann_density(length: usize, beta_prime: f64) -> f64 {
    let l = length as f64;
    let x = 2.0 * beta_prime;
    // 1/(1 + e^x) evaluated on the side that cannot overflow
    let logistic = if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    };
    (1.0 - 1.0 / l) * logistic
}

/// Inverts [`boltzmann_density`]: β′ = ½ ln((1 − 1/L)/ρ − 1).
pub fn beta_from_density(length: usize, rho: f64) -> Result<f64> {
    check_length(length)?;
    let max = 1.0 - 1.0 / length as f64;
    if !(rho > 0.0 && rho < max) {
        return Err(Error::domain(format!("kink density {rho} outside (0, {max})")));
    }
    Ok(0.5 * (max / rho - 1.0).ln())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaFit {
    pub length: usize,
    /// Minimizer of D_KL(P ‖ Q(β′)).
    pub beta_kl: f64,
    pub kl: f64,
    /// Minimizer of D_TN(P, Q(β′)), searched from `beta_kl`.
    pub beta_tn: f64,
    pub tn: f64,
}

/// Fits β′ to an empirical kink distribution: first by minimizing
/// D_KL(P ‖ Q), then by minimizing the trace norm starting from that value.
///
/// The KL objective is minimized in the shifted form
/// D_KL(β′) − D_KL(β₀) with β₀ the closed-form density inversion; the shift
/// is evaluated with expm1/ln1p so that it stays accurate near its minimum.
pub fn fit_beta(p_emp: &KinkDistribution, length: usize) -> Result<BetaFit> {
    check_length(length)?;
    let p = p_emp.trimmed();
    if p.max_n() > length - 1 {
        return Err(Error::domain(format!(
            "D_KL undefined: P({}) > 0 but a chain of length {length} has at most {} kinks",
            p.max_n(),
            length - 1
        )));
    }
    let l = length as f64;
    let bonds = l - 1.0;
    let mean = p.mean();
    // E_P[2n + 1 − L]
    let mu = 2.0 * mean + 1.0 - l;
    let anchor = beta_from_density(length, mean / l).unwrap_or(0.0);
    let a0 = anchor.abs();
    let e0 = (-2.0 * a0).exp();
    let shifted_kl = |beta: f64| -> f64 {
        let da = beta.abs() - a0;
        let ln_cosh_diff = da + (e0 * (-2.0 * da).exp_m1() / (1.0 + e0)).ln_1p();
        (beta - anchor) * mu + bonds * ln_cosh_diff
    };
    let step = 0.05 * anchor.abs().max(0.1);
    let bracket = bracket_minimum(shifted_kl, anchor, step, MAX_EXPANSIONS)
        .map_err(|e| Error::Optimizer(format!("KL fit (mean kinks {mean}, L = {length}): {e}")))?;
    let beta_kl = golden_section(shifted_kl, bracket, BETA_TOLERANCE).x;

    let ln_binom = ln_binomials(length - 1);
    let q_at = |beta: f64| -> KinkDistribution {
        let q: Vec<f64> = log_pmf_with(&ln_binom, beta).into_iter().map(f64::exp).collect();
        KinkDistribution::from_weights(0, q).expect("finite positive weights")
    };
    let kl = kl_to_boltzmann(&p, &log_pmf_with(&ln_binom, beta_kl));
    let tn_of = |beta: f64| tv_distance(&p, &q_at(beta));
    let bracket = bracket_minimum(tn_of, beta_kl, step * 0.1, MAX_EXPANSIONS)
        .map_err(|e| Error::Optimizer(format!("trace-norm fit from beta' = {beta_kl}: {e}")))?;
    let tn_min = golden_section(tn_of, bracket, BETA_TOLERANCE);
    Ok(BetaFit {
        length,
        beta_kl,
        kl,
        beta_tn: tn_min.x,
        tn: tn_min.value,
    })
}

fn kl_to_boltzmann(p: &KinkDistribution, log_q: &[f64]) -> f64 {
    p.iter()
        .filter(|&(_, pn)| pn > 0.0)
        .map(|(n, pn)| pn * (pn.ln() - log_q[n]))
        .sum::<f64>()
        .max(0.0)
}

/// Trace-norm distance between each empirical distribution and the
/// Boltzmann distribution at a fixed β′, keyed by annealing time.
pub fn tn_decay_series(series: &[(f64, KinkDistribution)], length: usize, beta_fixed: f64) -> Result<Vec<(f64, f64)>> {
    let q = boltzmann_pmf(length, beta_fixed)?;
    Ok(series.par_iter().map(|(t, p)| (*t, tv_distance(p, &q))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::histogram;
    use crate::theory::gaussian_pmf;
    use proptest::prelude::*;
    use rand::Rng;

    fn binom(m: u64, n: u64) -> f64 {
        (0..n).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn infinite_temperature_is_pure_degeneracy() {
        let q = boltzmann_pmf(11, 0.0).unwrap();
        for (n, p) in q.iter() {
            assert!((p - binom(10, n as u64) / 1024.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_temperature_is_ground_state() {
        let q = boltzmann_pmf(50, 40.0).unwrap();
        assert!((q.prob(0) - 1.0).abs() < 1e-12);
        let q = boltzmann_pmf(50, -40.0).unwrap();
        assert!((q.prob(49) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_spins_by_hand() {
        let e = std::f64::consts::E;
        let w = [e * e, 2.0, 1.0 / (e * e)];
        let z: f64 = w.iter().sum();
        let q = boltzmann_pmf(3, 1.0).unwrap();
        for (n, wn) in w.iter().enumerate() {
            assert!((q.prob(n) - wn / z).abs() < 1e-15);
        }
        assert!(boltzmann_pmf(1, 0.0).is_err());
    }

    #[test]
    fn mean_matches_density_formula() {
        for l in [3usize, 50, 800] {
            for beta in [-2.0, 0.0, 1.0, 5.0] {
                let q = boltzmann_pmf(l, beta).unwrap();
                let mean = q.mean();
                let expect = l as f64 * boltzmann_density(l, beta);
                assert!((mean - expect).abs() <= 1e-12 * expect.max(1.0), "L={l} beta={beta}: {mean} vs {expect}");
                assert!((q.pmf().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn large_chain_is_finite() {
        for beta in [-20.0, -7.5, 0.3, 20.0] {
            let log = boltzmann_log_pmf(800, beta).unwrap();
            assert!(log.iter().all(|x| x.is_finite()));
            assert!(boltzmann_pmf(800, beta).is_ok());
        }
    }

    #[test]
    fn density_inversion() {
        let l = 200;
        let mid = (1.0 - 1.0 / l as f64) / 2.0;
        assert_eq!(beta_from_density(l, mid).unwrap(), 0.0);
        for beta in [-3.0, -0.2, 0.0, 0.7, 4.0] {
            let rho = boltzmann_density(l, beta);
            assert!((beta_from_density(l, rho).unwrap() - beta).abs() < 1e-12);
        }
        assert!(beta_from_density(l, 0.0).is_err());
        assert!(beta_from_density(l, 1.0 - 1.0 / l as f64).is_err());
    }

    #[test]
    fn self_fit_recovers_beta() {
        for (l, beta) in [(50usize, 0.4), (200, 1.7), (800, 2.3), (30, -0.8)] {
            let fit = fit_beta(&boltzmann_pmf(l, beta).unwrap(), l).unwrap();
            assert!((fit.beta_kl - beta).abs() < 1e-8, "{fit:?}");
            assert!((fit.beta_tn - beta).abs() < 1e-8, "{fit:?}");
            assert!(fit.kl < 1e-12 && fit.tn < 1e-8);
        }
    }

    #[test]
    fn gaussian_fit_is_moment_matched() {
        let l = 800;
        let p = gaussian_pmf(37.5, 10..=70).unwrap();
        let fit = fit_beta(&p, l).unwrap();
        let expect = beta_from_density(l, p.mean() / l as f64).unwrap();
        assert!((fit.beta_kl - expect).abs() < 1e-6);
        assert!(fit.tn > 0.0 && fit.tn < 1.0);
    }

    #[test]
    fn hotter_data_has_higher_temperature() {
        let l = 800;
        let cold = fit_beta(&gaussian_pmf(30.0, 0..=80).unwrap(), l).unwrap();
        let hot = fit_beta(&gaussian_pmf(45.0, 10..=90).unwrap(), l).unwrap();
        assert!(1.0 / hot.beta_kl > 1.0 / cold.beta_kl);
        let device = Device::nasa();
        let t = BoltzmannModel::new(l, hot.beta_kl).unwrap().effective_temperature(&device);
        assert!((t.kelvin - device.effective_temperature_k(hot.beta_kl)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_input_fails_cleanly() {
        let err = fit_beta(&KinkDistribution::point_mass(0), 100).unwrap_err();
        assert!(matches!(err, Error::Optimizer(_)), "{err}");
        let err = fit_beta(&KinkDistribution::point_mass(10), 10).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn series_from_the_model_is_flat_noise() {
        let (l, beta) = (200, 1.2);
        let q = boltzmann_pmf(l, beta).unwrap();
        let cdf: Vec<f64> = q.pmf().iter().scan(0.0, |acc, p| { *acc += p; Some(*acc) }).collect();
        let mut rng = crate::seed::rng(2);
        let series: Vec<(f64, KinkDistribution)> = (1..=6)
            .map(|i| {
                let counts: Vec<usize> = (0..20_000)
                    .map(|_| { let u: f64 = rng.random(); cdf.partition_point(|&c| c < u).min(l - 1) })
                    .collect();
                (i as f64, histogram(&counts).unwrap())
            })
            .collect();
        let d = tn_decay_series(&series, l, beta).unwrap();
        assert!(d.iter().all(|&(_, tn)| tn < 0.05), "{d:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn kl_optimum_matches_mean(offset in 1usize..40, weights in proptest::collection::vec(0.0f64..1.0, 1..30)) {
            let l = 100;
            let p = KinkDistribution::from_weights(offset, weights);
            prop_assume!(p.is_ok());
            let p = p.unwrap();
            let fit = fit_beta(&p, l).unwrap();
            let q = boltzmann_pmf(l, fit.beta_kl).unwrap();
            prop_assert!((q.mean() - p.mean()).abs() < 1e-8, "{} vs {}", q.mean(), p.mean());
        }
    }
}
