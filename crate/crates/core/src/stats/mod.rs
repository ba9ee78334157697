//! Empirical estimators: cumulants with bootstrap intervals, least-squares
//! fits, histograms and distribution distances.

mod cumulants;
mod distance;
mod fit;

pub use cumulants::{estimate_cumulants, k_statistics, CumulantEstimate, Interval, DEFAULT_RESAMPLES};
pub use distance::{histogram, kl_divergence, tv_distance};
pub use fit::{
    fit_constant, fit_decay_shape, fit_power_law, DecayFit, DecayShape, FitKind, FitParam, FitPoint, FitResult,
    Weighting,
};
