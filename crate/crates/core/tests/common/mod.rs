//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;

use kinkstat::embedding::ChimeraGraph;

/// Exact PMF of the kink count of the projected rotor chain at a frozen
/// schedule point, for the stationary density ∝ exp(−βE) over θ ∈ [0, π]^L
/// with E = b Σ J_i cos θ_i cos θ_{i+1} − a Σ sin θ_i.
///
/// Each angle is split into a sign σ (θ < π/2 or not) and a magnitude
/// v ∈ [0, π/2] with cos θ = σ cos v, sin θ = sin v. A bond is a kink when
/// J_i σ_i σ_{i+1} = +1, so its Boltzmann factor is exp(∓βb cos v cos v′)
/// for kink / no kink whatever J_i is. Summing over σ given the kink pattern
/// leaves a transfer integral in v, done with `grid` midpoints, and a
/// polynomial in the kink count.
pub fn rotor_kink_pmf(length: usize, a: f64, b: f64, beta: f64, grid: usize) -> Vec<f64> {
    let h = (PI / 2.0) / grid as f64;
    let v: Vec<f64> = (0..grid).map(|i| (i as f64 + 0.5) * h).collect();
    let (cv, sv): (Vec<f64>, Vec<f64>) = v.iter().map(|x| (x.cos(), x.sin())).unzip();
    // Site weights are scaled by their maximum to keep numbers in range.
    let site: Vec<f64> = sv.iter().map(|s| (beta * a * (s - 1.0)).exp() * h).collect();
    let kink = |i: usize, j: usize| (-beta * b * cv[i] * cv[j] - beta * b).exp();
    let flat = |i: usize, j: usize| (beta * b * cv[i] * cv[j] - beta * b).exp();

    let bonds = length - 1;
    // f[n][j]: weight of the first sites with n kinks, last magnitude v_j.
    let mut f = vec![vec![0.0; grid]; bonds + 1];
    f[0].clone_from(&site);
    for step in 0..bonds {
        let mut next = vec![vec![0.0; grid]; bonds + 1];
        for n in 0..=step {
            let cur = &f[n];
            if cur.iter().all(|x| *x == 0.0) {
                continue;
            }
            for j in 0..grid {
                let (mut no, mut yes) = (0.0, 0.0);
                for i in 0..grid {
                    no += cur[i] * flat(i, j);
                    yes += cur[i] * kink(i, j);
                }
                next[n][j] += no * site[j];
                next[n + 1][j] += yes * site[j];
            }
        }
        f = next;
    }
    let weights: Vec<f64> = f.iter().map(|row| row.iter().sum()).collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Correlation length of ⟨cos θ_i cos θ_{i+r}⟩ for the infinite
/// ferromagnetic rotor chain E = −J Σ cos θ_i cos θ_{i+1} − Γ Σ sin θ_i at
/// inverse temperature β, from the two leading eigenvalues of the transfer
/// kernel: the largest in the sector even under θ → π − θ and the largest
/// in the odd sector, where cos θ lives. ξ = 1/ln(λ_even/λ_odd).
pub fn rotor_transfer_correlation_length(j: f64, gamma: f64, beta: f64, grid: usize) -> f64 {
    // Half interval u ∈ [0, π/2]; the partner point is π − u, where
    // cos flips sign and sin is unchanged.
    let h = (PI / 2.0) / grid as f64;
    let u: Vec<f64> = (0..grid).map(|i| (i as f64 + 0.5) * h).collect();
    let (c, s): (Vec<f64>, Vec<f64>) = u.iter().map(|x| (x.cos(), x.sin())).unzip();
    // Symmetric kernel with the site field split between both ends. The
    // exponent peaks at Γ (u = u′ = π/2) when Γ ≥ 2J; subtracting it only
    // rescales eigenvalues.
    let shift = beta * gamma.max(j + 0.5 * gamma);
    let k = |p: usize, q: usize, sign: f64| {
        let e = sign * j * c[p] * c[q] + 0.5 * gamma * (s[p] + s[q]);
        (beta * e - shift).exp()
    };
    let sector = |parity: f64| -> f64 {
        let m: Vec<Vec<f64>> = (0..grid)
            .map(|p| (0..grid).map(|q| (k(p, q, 1.0) + parity * k(p, q, -1.0)) * h).collect())
            .collect();
        let mut x = vec![1.0; grid];
        let mut lambda = 0.0;
        for _ in 0..5000 {
            let y: Vec<f64> = m.iter().map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            let next: Vec<f64> = y.iter().map(|v| v / norm).collect();
            let done = (norm - lambda).abs() <= 1e-14 * norm;
            lambda = norm;
            x = next;
            if done {
                break;
            }
        }
        lambda
    };
    1.0 / (sector(1.0) / sector(-1.0)).ln()
}

/// PMF of a sum of independent Bernoulli variables by enumerating all 2^m
/// outcomes.
pub fn enumerate_poisson_binomial(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut pmf = vec![0.0; m + 1];
    for mask in 0u32..(1 << m) {
        let mut prob = 1.0;
        for (i, pi) in p.iter().enumerate() {
            prob *= if mask >> i & 1 == 1 { *pi } else { 1.0 - pi };
        }
        pmf[mask.count_ones() as usize] += prob;
    }
    pmf
}

/// Chimera adjacency straight from the definition: K_{4,4} inside a cell,
/// vertical-side qubits to the same index one row over, horizontal-side
/// qubits to the same index one column over.
pub fn brute_chimera_adjacent(g: &ChimeraGraph, a: u32, b: u32) -> bool {
    if a == b {
        return false;
    }
    let (x, y) = (g.decompose(a).unwrap(), g.decompose(b).unwrap());
    let same_cell = x.row == y.row && x.col == y.col;
    let dr = (x.row as i64 - y.row as i64).abs();
    let dc = (x.col as i64 - y.col as i64).abs();
    (same_cell && x.side != y.side)
        || (x.side == 0 && y.side == 0 && x.index == y.index && x.col == y.col && dr == 1)
        || (x.side == 1 && y.side == 1 && x.index == y.index && x.row == y.row && dc == 1)
}

/// Total-variation distance between two PMFs on 0..n.
pub fn tv(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    0.5 * (0..n).map(|i| (p.get(i).unwrap_or(&0.0) - q.get(i).unwrap_or(&0.0)).abs()).sum::<f64>()
}

/// Largest r with G(r) ≥ `fraction`·G(0), scanning up from r = 1; used as
/// the upper end of correlation-length fits so the noise floor stays out.
pub fn correlation_cutoff(g: &[f64], fraction: f64) -> usize {
    let floor = fraction * g[0];
    (1..g.len()).take_while(|&r| g[r] >= floor).last().unwrap_or(1)
}
