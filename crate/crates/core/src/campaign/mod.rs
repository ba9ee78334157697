//! Reproducible experiment campaigns: a TOML configuration names a mode
//! (SVMC generation, exact theory, or ingestion of a sample file), a time
//! grid and analysis options; [`run_campaign`] produces a [`Report`] that
//! [`emit_report`] writes as JSON, a CSV bundle or a markdown table.
//!
//! Points on the grid run in parallel and are assembled in grid order, so
//! a report depends only on the configuration and its master seed.

mod config;
mod ingest;
mod pipeline;
mod report;

pub use config::{preset_names, AnalysisSection, CampaignConfig, IngestSection, InstanceSpec, Mode, SvmcSection};
pub use ingest::{ingest_reader, ingest_samples, InstanceSource};
pub use pipeline::{
    analyze_counts, bootstrap_seed, campaign_instance, fit_points, generation_seed, pool_by_time, run_campaign,
    run_campaign_with_samples, SEED_SCHEME,
};
pub use report::{
    emit_report, format_pm, CumulantFits, DecaySeries, PointFailure, PointReport, PointSeeds, Provenance, RatioFits,
    Report, ReportFormat,
};
