//! Kink statistics of annealed one-dimensional transverse-field Ising chains.
//!
//! The crate covers the full pipeline for studying defect formation when a
//! free-boundary Ising chain is driven across its quantum critical point:
//!
//! - [`model`]: annealing schedules, chain instances, spin samples, kink
//!   counting and gauge transforms.
//! - [`embedding`]: Chimera hardware graph and self-avoiding chain embeddings.
//! - [`svmc`]: classical spin-vector Monte Carlo annealing.
//! - [`theory`]: exact closed-system mode theory (Landau-Zener mode
//!   probabilities, Poisson-binomial kink distributions, cumulants, and a
//!   numerically exact per-mode integrator).
//! - [`stats`]: cumulant estimation with bootstrap intervals, power-law and
//!   constant fits, histograms and distribution distances.
//! - [`boltzmann`]: classical Boltzmann kink distribution and effective
//!   temperature fits.
//! - [`campaign`]: configuration, ingestion, orchestration and reports.
//!
//! Runnable walkthroughs for each part live in the crate's `examples/`
//! directory (`cargo run --release -p kinkstat --example <name>`).

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boltzmann;
pub mod campaign;
pub mod embedding;
mod error;
pub mod model;
pub mod optimize;
pub mod seed;
pub mod stats;
pub mod svmc;
pub mod theory;
pub mod units;

pub use error::{Error, Result};
