use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::embedding::ChimeraGraph;
use crate::{seed, Error, Result};

/// Uniform coupling sign, or a random gauge applied on top of a
/// ferromagnetic chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    /// J = −1 on every bond.
    Ferro,
    /// J = +1 on every bond.
    Antiferro,
    /// Ferromagnetic chain with floor(L/2) randomly chosen sites gauge-flipped.
    Gauge,
}

impl FromStr for CouplingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ferro" => Ok(CouplingKind::Ferro),
            "antiferro" => Ok(CouplingKind::Antiferro),
            "gauge" => Ok(CouplingKind::Gauge),
            other => Err(Error::invalid("coupling", format!("expected ferro|antiferro|gauge, got '{other}'"))),
        }
    }
}

impl fmt::Display for CouplingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CouplingKind::Ferro => "ferro",
            CouplingKind::Antiferro => "antiferro",
            CouplingKind::Gauge => "gauge",
        })
    }
}

/// Chimera embedding of a chain: `vertices[i]` hosts spin i.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub cells: usize,
    pub vertices: Vec<u32>,
}

/// Free-boundary chain of L spins with per-bond couplings J_i ∈ {−1, +1}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainInstance {
    id: String,
    couplings: Vec<i8>,
    embedding: Option<Embedding>,
}

impl ChainInstance {
    /// A chain with `couplings.len() + 1` spins.
    pub fn new(id: impl Into<String>, couplings: Vec<i8>) -> Result<Self> {
        if let Some(bad) = couplings.iter().position(|&j| j != 1 && j != -1) {
            return Err(Error::invalid(
                "chain instance",
                format!("coupling {bad} is {}, expected ±1", couplings[bad]),
            ));
        }
        Ok(ChainInstance {
            id: id.into(),
            couplings,
            embedding: None,
        })
    }

    /// Uniform ferro- or antiferromagnetic chain. `Gauge` is drawn from `seed`.
    pub fn uniform(id: impl Into<String>, length: usize, kind: CouplingKind, gauge_seed: u64) -> Result<Self> {
        if length == 0 {
            return Err(Error::invalid("chain instance", "length must be positive"));
        }
        let id = id.into();
        match kind {
            CouplingKind::Ferro => Self::new(id, vec![-1; length - 1]),
            CouplingKind::Antiferro => Self::new(id, vec![1; length - 1]),
            CouplingKind::Gauge => {
                let ferro = Self::new(id, vec![-1; length - 1])?;
                Ok(apply_random_gauge(&ferro, gauge_seed).0)
            }
        }
    }

    /// Attaches a Chimera embedding after checking that it is a self-avoiding
    /// path of the right length.
    pub fn with_embedding(mut self, graph: &ChimeraGraph, vertices: Vec<u32>) -> Result<Self> {
        graph.validate_path(&vertices)?;
        if vertices.len() != self.len() {
            return Err(Error::invalid(
                "chain instance",
                format!("embedding has {} vertices for a chain of {}", vertices.len(), self.len()),
            ));
        }
        self.embedding = Some(Embedding {
            cells: graph.cells(),
            vertices,
        });
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Number of spins L.
    pub fn len(&self) -> usize {
        self.couplings.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn couplings(&self) -> &[i8] {
        &self.couplings
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        self.embedding.as_ref()
    }
}

/// Final spin configuration, stored one bit per spin (set = +1).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    bits: BitVec<u64, Lsb0>,
}

impl SpinConfig {
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let mut bits = BitVec::with_capacity(signs.len());
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => bits.push(true),
                -1 => bits.push(false),
                other => return Err(Error::invalid("spin configuration", format!("spin {i} is {other}"))),
            }
        }
        Ok(SpinConfig { bits })
    }

    pub fn from_fn(len: usize, mut up: impl FnMut(usize) -> bool) -> Self {
        SpinConfig {
            bits: (0..len).map(&mut up).collect(),
        }
    }

    pub fn all_up(len: usize) -> Self {
        SpinConfig {
            bits: bitvec![u64, Lsb0; 1; len],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Spin i as ±1.
    pub fn spin(&self, i: usize) -> i8 {
        if self.bits[i] {
            1
        } else {
            -1
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.len()).map(|i| self.spin(i)).collect()
    }

    /// Flips every spin whose mask entry is set.
    pub fn flipped(&self, mask: &[bool]) -> Result<Self> {
        if mask.len() != self.len() {
            return Err(Error::invalid(
                "gauge mask",
                format!("mask has {} entries for {} spins", mask.len(), self.len()),
            ));
        }
        let mut bits = self.bits.clone();
        for (i, &m) in mask.iter().enumerate() {
            if m {
                let v = bits[i];
                bits.set(i, !v);
            }
        }
        Ok(SpinConfig { bits })
    }
}

impl fmt::Display for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits.iter() {
            f.write_str(if *b { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpinConfig({self})")
    }
}

impl FromStr for SpinConfig {
    type Err = Error;

    /// Parses a `+`/`-` string. The error reports the 1-based column.
    fn from_str(s: &str) -> Result<Self> {
        let mut bits = BitVec::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '+' => bits.push(true),
                '-' => bits.push(false),
                other => {
                    return Err(Error::invalid(
                        "spin string",
                        format!("character '{other}' at column {}", i + 1),
                    ))
                }
            }
        }
        if bits.is_empty() {
            return Err(Error::invalid("spin string", "empty"));
        }
        Ok(SpinConfig { bits })
    }
}

/// Number of frustrated bonds, i.e. bonds with J_i·σ_i·σ_{i+1} = +1.
pub fn count_kinks(instance: &ChainInstance, config: &SpinConfig) -> Result<usize> {
    if config.len() != instance.len() {
        return Err(Error::invalid(
            "spin configuration",
            format!("{} spins for a chain of length {}", config.len(), instance.len()),
        ));
    }
    Ok(count_kinks_unchecked(instance.couplings(), config))
}

pub(crate) fn count_kinks_unchecked(couplings: &[i8], config: &SpinConfig) -> usize {
    let bits = &config.bits;
    couplings
        .iter()
        .enumerate()
        .filter(|&(i, &j)| {
            let aligned = bits[i] == bits[i + 1];
            // J = +1 frustrated when aligned, J = −1 when anti-aligned
            aligned == (j > 0)
        })
        .count()
}

/// Mean kink density ⟨n⟩/L together with the per-configuration counts.
///
/// The density divides by the number of spins L, not by the number of bonds
/// L − 1, so a maximally kinked chain has density (L − 1)/L and the
/// Boltzmann density reads (1 − 1/L)/(1 + e^{2β′}).
pub fn kink_density(instance: &ChainInstance, configs: &[SpinConfig]) -> Result<(f64, Vec<usize>)> {
    if configs.is_empty() {
        return Err(Error::invalid("kink density", "no configurations"));
    }
    let counts = configs
        .iter()
        .map(|c| count_kinks(instance, c))
        .collect::<Result<Vec<_>>>()?;
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    Ok((mean / instance.len() as f64, counts))
}

/// Gauge transform: flipping site i negates the couplings of bonds (i−1, i)
/// and (i, i+1). Applying the same mask twice restores the instance.
pub fn apply_gauge(instance: &ChainInstance, mask: &[bool]) -> Result<ChainInstance> {
    if mask.len() != instance.len() {
        return Err(Error::invalid(
            "gauge mask",
            format!("mask has {} entries for {} spins", mask.len(), instance.len()),
        ));
    }
    let couplings = instance
        .couplings()
        .iter()
        .enumerate()
        .map(|(i, &j)| if mask[i] != mask[i + 1] { -j } else { j })
        .collect();
    Ok(ChainInstance {
        id: instance.id.clone(),
        couplings,
        embedding: instance.embedding.clone(),
    })
}

/// Random gauge flipping floor(L/2) distinct sites chosen uniformly.
pub fn apply_random_gauge(instance: &ChainInstance, gauge_seed: u64) -> (ChainInstance, Vec<bool>) {
    let len = instance.len();
    let mut rng = seed::rng(gauge_seed);
    let mut mask = vec![false; len];
    for site in sample(&mut rng, len, len / 2) {
        mask[site] = true;
    }
    let gauged = apply_gauge(instance, &mask).expect("mask length matches");
    (gauged, mask)
}
