//! Spin-vector Monte Carlo: each qubit becomes a planar rotor θ_i ∈ [0, π]
//! with energy
//!
//! ```text
//! E(θ; s) = (B(s)/2) Σ J_i cos θ_i cos θ_{i+1} − (A(s)/2) Σ sin θ_i
//! ```
//!
//! evolved by sequential Metropolis sweeps while s is ramped from 0 to 1.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{AnnealSchedule, ChainInstance, SampleSet, SampleSource, SpinConfig};
use crate::units::Temperature;
use crate::{seed, Error, Result};

/// Default sweeps per unit t′_a for NASA-like runs.
pub const N0_NASA: u32 = 1000;
/// Default sweeps per unit t′_a for Burnaby-like runs.
pub const N0_BURNABY: u32 = 1500;
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmcParams {
    pub schedule: AnnealSchedule,
    pub temperature: Temperature,
    pub n0: u32,
    pub ta_prime: f64,
    pub samples: usize,
    pub seed: u64,
}

impl SvmcParams {
    /// Validates the parameters, including that the temperature unit matches
    /// the schedule's energy unit.
    pub fn new(
        schedule: AnnealSchedule,
        temperature: Temperature,
        n0: u32,
        ta_prime: f64,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        temperature.inverse_in(schedule.unit())?;
        if n0 < 1 {
            return Err(Error::invalid("svmc", "n0 must be at least 1"));
        }
        if !(ta_prime.is_finite() && ta_prime >= 1.0) {
            return Err(Error::invalid("svmc", format!("t'_a = {ta_prime} must be at least 1")));
        }
        if samples < 1 {
            return Err(Error::invalid("svmc", "samples must be at least 1"));
        }
        Ok(SvmcParams {
            schedule,
            temperature,
            n0,
            ta_prime,
            samples,
            seed,
        })
    }

    /// Inverse temperature in inverse schedule-energy units.
    pub fn beta(&self) -> f64 {
        self.temperature.inverse_in(self.schedule.unit()).expect("checked at construction")
    }

    /// Total sweep count N₀·t′_a, rounded.
    pub fn sweeps(&self) -> usize {
        ((self.n0 as f64 * self.ta_prime).round() as usize).max(1)
    }

    pub fn with_ta_prime(&self, ta_prime: f64) -> Result<Self> {
        Self::new(self.schedule.clone(), self.temperature, self.n0, ta_prime, self.samples, self.seed)
    }
}

/// s used by sweep m of n: m/(n − 1), so the last sweep runs at s = 1.
pub fn sweep_s(m: usize, n: usize) -> f64 {
    if n <= 1 {
        1.0
    } else {
        m as f64 / (n - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleState {
    angles: Vec<f64>,
}

impl AngleState {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if let Some(i) = angles.iter().position(|t| !(0.0..=PI).contains(t)) {
            return Err(Error::invalid("angle state", format!("theta_{i} = {} outside [0, pi]", angles[i])));
        }
        Ok(AngleState { angles })
    }

    /// All rotors along the transverse field, θ = π/2.
    pub fn transverse(length: usize) -> Self {
        AngleState { angles: vec![FRAC_PI_2; length] }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// +1 for θ ≤ π/2 (the tie θ = π/2 included), −1 otherwise.
    pub fn project(&self) -> SpinConfig {
        SpinConfig::from_fn(self.angles.len(), |i| self.angles[i] <= FRAC_PI_2)
    }
}

/// Rotor energy in schedule units.
pub fn svmc_energy(instance: &ChainInstance, state: &AngleState, s: f64, schedule: &AnnealSchedule) -> Result<f64> {
    if state.len() != instance.len() {
        return Err(Error::invalid(
            "angle state",
            format!("{} angles for a chain of length {}", state.len(), instance.len()),
        ));
    }
    let (a_half, b_half) = schedule.half(s)?;
    Ok(energy_with(instance.couplings(), state.angles(), a_half, b_half))
}

fn energy_with(couplings: &[i8], angles: &[f64], a_half: f64, b_half: f64) -> f64 {
    let ising: f64 = couplings
        .iter()
        .enumerate()
        .map(|(i, &j)| j as f64 * angles[i].cos() * angles[i + 1].cos())
        .sum();
    let field: f64 = angles.iter().map(|t| t.sin()).sum();
    b_half * ising - a_half * field
}

/// Accepts a move of energy change `delta_e` at inverse temperature `beta`.
#[inline]
pub fn metropolis_accept<R: Rng>(delta_e: f64, beta: f64, rng: &mut R) -> bool {
    delta_e <= 0.0 || rng.random::<f64>() < (-beta * delta_e).exp()
}

/// Single-chain Metropolis sampler with cached cos θ and sin θ.
#[derive(Debug, Clone)]
pub struct SvmcSampler {
    couplings: Vec<f64>,
    theta: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
    rng: ChaCha8Rng,
}

impl SvmcSampler {
    pub fn new(instance: &ChainInstance, initial: AngleState, seed: u64) -> Result<Self> {
        if initial.len() != instance.len() {
            return Err(Error::invalid(
                "angle state",
                format!("{} angles for a chain of length {}", initial.len(), instance.len()),
            ));
        }
        let theta = initial.angles;
        Ok(SvmcSampler {
            couplings: instance.couplings().iter().map(|&j| j as f64).collect(),
            cos: theta.iter().map(|t| t.cos()).collect(),
            sin: theta.iter().map(|t| t.sin()).collect(),
            theta,
            rng: seed::rng(seed),
        })
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    pub fn cosines(&self) -> &[f64] {
        &self.cos
    }

    pub fn state(&self) -> AngleState {
        AngleState { angles: self.theta.clone() }
    }

    pub fn project(&self) -> SpinConfig {
        SpinConfig::from_fn(self.theta.len(), |i| self.theta[i] <= FRAC_PI_2)
    }

    pub fn energy(&self, a_half: f64, b_half: f64) -> f64 {
        energy_with_f(&self.couplings, &self.cos, &self.sin, a_half, b_half)
    }

    /// Energy change of setting site i to an angle with the given cosine and
    /// sine.
    #[inline]
    pub fn delta_energy(&self, i: usize, cos_new: f64, sin_new: f64, a_half: f64, b_half: f64) -> f64 {
        let mut local = 0.0;
        if i > 0 {
            local += self.couplings[i - 1] * self.cos[i - 1];
        }
        if i + 1 < self.theta.len() {
            local += self.couplings[i] * self.cos[i + 1];
        }
        b_half * (cos_new - self.cos[i]) * local - a_half * (sin_new - self.sin[i])
    }

    /// Proposes a uniform angle in [0, π] for site i; returns whether it was
    /// accepted.
    #[inline]
    pub fn try_update(&mut self, i: usize, a_half: f64, b_half: f64, beta: f64) -> bool {
        let proposal = self.rng.random::<f64>() * PI;
        let (s, c) = proposal.sin_cos();
        let delta = self.delta_energy(i, c, s, a_half, b_half);
        if metropolis_accept(delta, beta, &mut self.rng) {
            self.theta[i] = proposal;
            self.cos[i] = c;
            self.sin[i] = s;
            true
        } else {
            false
        }
    }

    /// One sequential sweep over sites 0..L; returns the number of accepted
    /// moves.
    pub fn sweep(&mut self, a_half: f64, b_half: f64, beta: f64) -> usize {
        (0..self.theta.len())
            .filter(|&i| self.try_update(i, a_half, b_half, beta))
            .count()
    }
}

fn energy_with_f(couplings: &[f64], cos: &[f64], sin: &[f64], a_half: f64, b_half: f64) -> f64 {
    let ising: f64 = couplings.iter().enumerate().map(|(i, j)| j * cos[i] * cos[i + 1]).sum();
    b_half * ising - a_half * sin.iter().sum::<f64>()
}

/// One annealing run from θ = π/2 through `sweeps` sweeps, projected to
/// spins.
pub fn anneal_once(instance: &ChainInstance, schedule: &AnnealSchedule, beta: f64, sweeps: usize, seed: u64) -> Result<SpinConfig> {
    let mut sampler = SvmcSampler::new(instance, AngleState::transverse(instance.len()), seed)?;
    for m in 0..sweeps {
        let (a_half, b_half) = schedule.half(sweep_s(m, sweeps))?;
        sampler.sweep(a_half, b_half, beta);
    }
    Ok(sampler.project())
}

/// Independent anneals of `instance`; sample k uses the k-th split of
/// `params.seed`, so the result is independent of thread scheduling.
pub fn svmc_anneal(instance: &Arc<ChainInstance>, params: &SvmcParams) -> Result<SampleSet> {
    let beta = params.beta();
    let sweeps = params.sweeps();
    let configs = (0..params.samples)
        .into_par_iter()
        .map(|k| anneal_once(instance, &params.schedule, beta, sweeps, seed::split(params.seed, k as u64)))
        .collect::<Result<Vec<_>>>()?;
    SampleSet::new(instance.clone(), params.ta_prime, configs, SampleSource::Svmc)
}

/// Configurations sampled at a frozen schedule point: `burn_in` sweeps, then
/// one projected configuration every `thin` sweeps until `count` are
/// collected.
#[allow(clippy::too_many_arguments)]
pub fn svmc_frozen_samples(
    instance: &ChainInstance,
    a_half: f64,
    b_half: f64,
    beta: f64,
    burn_in: usize,
    thin: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<SpinConfig>> {
    let thin = thin.max(1);
    let mut sampler = SvmcSampler::new(instance, AngleState::transverse(instance.len()), seed)?;
    for _ in 0..burn_in {
        sampler.sweep(a_half, b_half, beta);
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        for _ in 0..thin {
            sampler.sweep(a_half, b_half, beta);
        }
        out.push(sampler.project());
    }
    Ok(out)
}

/// Classical correlation length √(J/(Γ − 2J)) of the ferromagnetic rotor
/// chain in its disordered phase. In SVMC terms J = B/2 and Γ = A/2.
pub fn svmc_correlation_length(j: f64, gamma: f64) -> Result<f64> {
    if !(j > 0.0 && gamma > 2.0 * j) {
        return Err(Error::domain(format!(
            "correlation length needs Gamma > 2J > 0, got J = {j}, Gamma = {gamma}"
        )));
    }
    Ok((j / (gamma - 2.0 * j)).sqrt())
}

/// Equilibrium correlation G(r) = ⟨cos θ_i cos θ_{i+r}⟩ of a uniform
/// ferromagnetic chain at fixed J = B/2, Γ = A/2, averaged over bulk sites
/// (at least `margin` away from either end) and over `measurements`
/// configurations taken every `thin` sweeps after `burn_in`.
#[allow(clippy::too_many_arguments)]
pub fn measure_correlation(
    length: usize,
    j: f64,
    gamma: f64,
    beta: f64,
    max_r: usize,
    burn_in: usize,
    thin: usize,
    measurements: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let margin = max_r.max(8);
    if length < 2 * margin + max_r + 1 {
        return Err(Error::invalid("correlation", format!("L = {length} too short for r up to {max_r}")));
    }
    let instance = ChainInstance::new("ferro", vec![-1; length - 1])?;
    let mut sampler = SvmcSampler::new(&instance, AngleState::transverse(length), seed)?;
    for _ in 0..burn_in {
        sampler.sweep(gamma, j, beta);
    }
    let mut g = vec![0.0; max_r + 1];
    let sites = margin..length - margin - max_r;
    for _ in 0..measurements {
        for _ in 0..thin.max(1) {
            sampler.sweep(gamma, j, beta);
        }
        let c = sampler.cosines();
        for (r, acc) in g.iter_mut().enumerate() {
            *acc += sites.clone().map(|i| c[i] * c[i + r]).sum::<f64>();
        }
    }
    let norm = (measurements * sites.len()) as f64;
    Ok(g.into_iter().map(|x| x / norm).collect())
}

/// Decay length from a least-squares fit of ln G(r) = c − r/ξ over
/// r ∈ [r_min, r_max].
pub fn fit_correlation_length(g: &[f64], r_min: usize, r_max: usize) -> Result<f64> {
    if r_max >= g.len() || r_max < r_min + 2 {
        return Err(Error::invalid("correlation fit", "need at least three distances in range"));
    }
    let pts: Vec<(f64, f64)> = (r_min..=r_max)
        .map(|r| {
            if g[r] > 0.0 {
                Ok((r as f64, g[r].ln()))
            } else {
                Err(Error::domain(format!("G({r}) = {} is not positive", g[r])))
            }
        })
        .collect::<Result<_>>()?;
    let n = pts.len() as f64;
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    let slope = sxy / sxx;
    if slope >= 0.0 {
        return Err(Error::domain("correlations do not decay over the fit range"));
    }
    Ok(-1.0 / slope)
}
