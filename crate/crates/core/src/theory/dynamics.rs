//! Numerically exact dynamics of the decoupled momentum modes.
//!
//! After the Jordan-Wigner and Fourier transforms, the ferromagnetic chain
//! with transverse field g = A(s)/2 and coupling J = B(s)/2 splits into
//! two-level problems
//!
//! ```text
//! H_k(s) = 2 (g − J cos k) τ_z + 2 J sin k τ_x
//! ```
//!
//! in the (empty, pair-occupied) basis of each mode pair (k, −k). Each mode
//! starts in the ground state of H_k(0) and the excitation probability is the
//! weight on the excited state of H_k(1). Units: ħ = 1 and energies in the
//! schedule's unit, so times are in inverse schedule energy.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::QuenchParams;
use crate::model::AnnealSchedule;
use crate::{Error, Result};

/// Step-doubling tolerance on each excitation probability.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-8;

const MAX_DOUBLINGS: u32 = 16;

/// Maps the dimensionless quench time τ onto an annealing time for a given
/// schedule.
///
/// Near the crossing s_c (A = B) the mode Hamiltonian is a Landau-Zener
/// problem with gap 4 J_c k and sweep rate 4 J_c |dr/dt|, r = A/B, which gives
/// p_k = exp(−2π J_c k² / |dr/dt|). Matching this to exp(−2π τ k²) yields
/// t_a = τ · |dr/ds| / J_c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchMapping {
    pub critical_s: f64,
    /// B(s_c)/2.
    pub critical_coupling: f64,
    /// |d(A/B)/ds| at s_c.
    pub ratio_slope: f64,
}

impl QuenchMapping {
    pub fn from_schedule(schedule: &AnnealSchedule) -> Result<Self> {
        let sc = schedule.critical_point()?;
        let (_, b_half) = schedule.half(sc)?;
        let ratio = |s: f64| -> Result<f64> {
            let (a, b) = schedule.eval(s)?;
            Ok(a / b)
        };
        let h = 1e-6;
        let (lo, hi) = ((sc - h).max(0.0), (sc + h).min(1.0));
        let slope = ((ratio(hi)? - ratio(lo)?) / (hi - lo)).abs();
        if !(slope.is_finite() && slope > 0.0 && b_half > 0.0) {
            return Err(Error::domain("schedule crossing is degenerate"));
        }
        Ok(QuenchMapping {
            critical_s: sc,
            critical_coupling: b_half,
            ratio_slope: slope,
        })
    }

    pub fn anneal_time(&self, tau: f64) -> f64 {
        tau * self.ratio_slope / self.critical_coupling
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeDynamics {
    pub momenta: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub anneal_time: f64,
    /// Largest step count any mode needed to converge.
    pub steps: usize,
    /// Largest | |ψ|² − 1 | seen during any integration.
    pub max_norm_drift: f64,
}

type Bloch = [f64; 3];

fn mode_field(schedule: &AnnealSchedule, k: f64, s: f64) -> Bloch {
    let (g, j) = schedule.half(s.clamp(0.0, 1.0)).expect("s clamped to [0, 1]");
    [2.0 * j * k.sin(), 0.0, 2.0 * (g - j * k.cos())]
}

fn unit(v: Bloch) -> Option<Bloch> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (n > 0.0).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

/// Spinor pointing along the unit Bloch vector `n`.
fn spinor(n: Bloch) -> [Complex64; 2] {
    let denom = 2.0 * (1.0 + n[2]);
    if denom > 1e-300 {
        let r = denom.sqrt();
        [Complex64::new((1.0 + n[2]) / r, 0.0), Complex64::new(n[0] / r, n[1] / r)]
    } else {
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
    }
}

fn overlap_sq(a: &[Complex64; 2], b: &[Complex64; 2]) -> f64 {
    (a[0].conj() * b[0] + a[1].conj() * b[1]).norm_sqr()
}

/// Applies exp(−i m·σ).
fn rotate(psi: &mut [Complex64; 2], m: Bloch) {
    let theta = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
    if theta == 0.0 {
        return;
    }
    let (s, c) = theta.sin_cos();
    let n = [m[0] / theta, m[1] / theta, m[2] / theta];
    let [a, b] = *psi;
    let na = Complex64::new(n[2], 0.0) * a + Complex64::new(n[0], -n[1]) * b;
    let nb = Complex64::new(n[0], n[1]) * a - Complex64::new(n[2], 0.0) * b;
    let mi = Complex64::new(0.0, -s);
    psi[0] = a * c + mi * na;
    psi[1] = b * c + mi * nb;
}

/// Integrates one mode over [0, t_a] with `steps` fourth-order Magnus steps
/// (two Gauss-Legendre nodes). Returns the excitation probability and the
/// largest norm drift.
fn integrate_mode(schedule: &AnnealSchedule, k: f64, anneal_time: f64, steps: usize) -> Result<(f64, f64)> {
    let ground = unit(mode_field(schedule, k, 0.0))
        .ok_or_else(|| Error::domain(format!("mode k = {k} has no gap at s = 0")))?;
    let excited_final = unit(mode_field(schedule, k, 1.0))
        .ok_or_else(|| Error::domain(format!("mode k = {k} has no gap at s = 1")))?;
    let mut psi = spinor([-ground[0], -ground[1], -ground[2]]);
    let chi = spinor(excited_final);

    let h = anneal_time / steps as f64;
    let c1 = 0.5 - 3f64.sqrt() / 6.0;
    let c2 = 0.5 + 3f64.sqrt() / 6.0;
    let comm = 3f64.sqrt() / 6.0 * h * h;
    let mut drift: f64 = 0.0;
    for n in 0..steps {
        let t = n as f64 * h;
        let h1 = mode_field(schedule, k, (t + c1 * h) / anneal_time);
        let h2 = mode_field(schedule, k, (t + c2 * h) / anneal_time);
        // h2 × h1
        let cross = [
            h2[1] * h1[2] - h2[2] * h1[1],
            h2[2] * h1[0] - h2[0] * h1[2],
            h2[0] * h1[1] - h2[1] * h1[0],
        ];
        let m = [
            0.5 * h * (h1[0] + h2[0]) + comm * cross[0],
            0.5 * h * (h1[1] + h2[1]) + comm * cross[1],
            0.5 * h * (h1[2] + h2[2]) + comm * cross[2],
        ];
        rotate(&mut psi, m);
        drift = drift.max((psi[0].norm_sqr() + psi[1].norm_sqr() - 1.0).abs());
    }
    Ok((overlap_sq(&chi, &psi), drift))
}

/// Evolves the given modes over an annealing time `anneal_time`, doubling
/// the step count from `initial_steps` until successive excitation
/// probabilities agree within [`CONVERGENCE_TOLERANCE`].
pub fn evolve_modes(
    schedule: &AnnealSchedule,
    momenta: &[f64],
    anneal_time: f64,
    initial_steps: usize,
) -> Result<ModeDynamics> {
    if !(anneal_time.is_finite() && anneal_time > 0.0) {
        return Err(Error::domain(format!("annealing time {anneal_time} must be positive")));
    }
    let initial_steps = initial_steps.max(1);
    let per_mode: Vec<(f64, usize, f64)> = momenta
        .par_iter()
        .map(|&k| {
            let mut steps = initial_steps;
            let (mut prev, mut drift) = integrate_mode(schedule, k, anneal_time, steps)?;
            for _ in 0..MAX_DOUBLINGS {
                steps *= 2;
                let (p, d) = integrate_mode(schedule, k, anneal_time, steps)?;
                drift = drift.max(d);
                if (p - prev).abs() < CONVERGENCE_TOLERANCE {
                    return Ok((p, steps, drift));
                }
                prev = p;
            }
            Err(Error::Integration(format!(
                "mode k = {k} not converged after {MAX_DOUBLINGS} step doublings ({steps} steps)"
            )))
        })
        .collect::<Result<_>>()?;
    Ok(ModeDynamics {
        momenta: momenta.to_vec(),
        probabilities: per_mode.iter().map(|m| m.0).collect(),
        anneal_time,
        steps: per_mode.iter().map(|m| m.1).max().unwrap_or(0),
        max_norm_drift: per_mode.iter().map(|m| m.2).fold(0.0, f64::max),
    })
}

/// Excitation probabilities of every positive mode of `q`, with the
/// annealing time obtained from τ through [`QuenchMapping`].
pub fn exact_mode_dynamics(q: &QuenchParams, schedule: &AnnealSchedule, initial_steps: usize) -> Result<ModeDynamics> {
    let mapping = QuenchMapping::from_schedule(schedule)?;
    evolve_modes(schedule, &q.momenta(), mapping.anneal_time(q.tau()), initial_steps)
}

/// Sudden-quench limit: overlap of the initial ground state with the final
/// excited state, (1 − ĥ(0)·ĥ(1))/2 for the mode's Bloch fields.
pub fn sudden_quench_probability(schedule: &AnnealSchedule, k: f64) -> Result<f64> {
    let a = unit(mode_field(schedule, k, 0.0)).ok_or_else(|| Error::domain("gapless initial mode"))?;
    let b = unit(mode_field(schedule, k, 1.0)).ok_or_else(|| Error::domain("gapless final mode"))?;
    Ok(0.5 * (1.0 - (a[0] * b[0] + a[1] * b[1] + a[2] * b[2])))
}
