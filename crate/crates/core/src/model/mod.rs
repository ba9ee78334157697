//! Core domain types: annealing schedules, chain instances, spin samples,
//! kink counting and gauge transforms.

mod chain;
mod samples;
mod schedule;

pub use chain::{
    apply_gauge, apply_random_gauge, count_kinks, kink_density, ChainInstance, CouplingKind, Embedding, SpinConfig,
};
pub use samples::{read_samples_csv, write_samples_csv, ParsedSample, SampleRow, SampleSet, SampleSource};
pub use schedule::{AnnealSchedule, EnergyUnit, SchedulePoint};
