use std::sync::Arc;

use rayon::prelude::*;

use super::config::{CampaignConfig, Mode};
use super::ingest::{ingest_samples, InstanceSource};
use super::report::{
    CumulantFits, DecaySeries, PointFailure, PointReport, PointSeeds, Provenance, RatioFits, Report,
};
use crate::boltzmann::{fit_beta, tn_decay_series, BoltzmannModel};
use crate::model::{AnnealSchedule, ChainInstance, SampleSet};
use crate::stats::{
    estimate_cumulants, fit_constant, fit_decay_shape, fit_power_law, histogram, tv_distance, CumulantEstimate,
    FitPoint, FitResult, Interval, Weighting,
};
use crate::svmc::{svmc_anneal, SvmcParams};
use crate::theory::{gaussian_pmf_lattice, kink_distribution, KinkDistribution, QuenchParams};
use crate::units::Device;
use crate::{seed, Error, Result};

/// Seed derivation, recorded in every report.
pub const SEED_SCHEME: &str =
    "generation seed of point i = split(split(master, 0), i); bootstrap seed = split(split(master, 1), i); \
     split is SplitMix64 of master + (index + 1) * golden gamma";

pub fn generation_seed(master: u64, index: usize) -> u64 {
    seed::split(seed::split(master, 0), index as u64)
}

pub fn bootstrap_seed(master: u64, index: usize) -> u64 {
    seed::split(seed::split(master, 1), index as u64)
}

/// Runs generation or ingestion and the full analysis chain. Points that
/// fail are listed in `failures`; the campaign fails only when every point
/// does.
pub fn run_campaign(config: &CampaignConfig) -> Result<Report> {
    Ok(run_campaign_with_samples(config)?.0)
}

/// As [`run_campaign`], also returning the sample sets behind the report
/// (empty in theory mode).
pub fn run_campaign_with_samples(config: &CampaignConfig) -> Result<(Report, Vec<SampleSet>)> {
    config.validate()?;
    match config.mode {
        Mode::Theory => Ok((run_theory(config)?, Vec::new())),
        Mode::Svmc => run_svmc(config),
        Mode::Ingest => run_ingest(config),
    }
}

/// Statistics of one time point from raw kink counts.
pub fn analyze_counts(
    time: f64,
    counts: &[usize],
    length: usize,
    instances: usize,
    bootstrap: usize,
    seeds: PointSeeds,
    with_boltzmann: bool,
) -> Result<PointReport> {
    let bootstrap_seed = seeds.bootstrap.unwrap_or(0);
    let cumulants = estimate_cumulants(counts, bootstrap, bootstrap_seed)?;
    let hist = histogram(counts)?;
    finish_point(time, counts.len(), instances, length, cumulants, hist, 1, seeds, with_boltzmann)
}

#[allow(clippy::too_many_arguments)]
fn finish_point(
    time: f64,
    n_samples: usize,
    instances: usize,
    length: usize,
    cumulants: CumulantEstimate,
    hist: KinkDistribution,
    stride: usize,
    seeds: PointSeeds,
    with_boltzmann: bool,
) -> Result<PointReport> {
    let l = length as f64;
    let k1 = cumulants.k1;
    let kink_density = Interval { point: k1.point / l, low: k1.low / l, high: k1.high / l };
    let gaussian_tv = if k1.point > 0.0 {
        gaussian_pmf_lattice(k1.point, 0..=length, stride).ok().map(|g| tv_distance(&hist, &g))
    } else {
        None
    };
    let beta_fit = if with_boltzmann { fit_beta(&hist, length).ok() } else { None };
    Ok(PointReport {
        time,
        n_samples,
        instances,
        kink_density,
        cumulants,
        histogram: hist,
        gaussian_tv,
        beta_fit,
        seeds,
    })
}

fn exact_interval(x: f64) -> Interval {
    Interval { point: x, low: x, high: x }
}

fn theory_point(length: usize, tau: f64, with_boltzmann: bool) -> Result<PointReport> {
    let q = QuenchParams::new(length, tau)?;
    let dist = kink_distribution(&q)?;
    let c = dist.cumulants();
    let ratio = |x: f64| (c.k1 > 0.0).then(|| exact_interval(x / c.k1));
    let cumulants = CumulantEstimate {
        k1: exact_interval(c.k1),
        k2: exact_interval(c.k2),
        k3: exact_interval(c.k3),
        ratio21: ratio(c.k2),
        ratio31: ratio(c.k3),
        n_samples: 0,
    };
    // Theory kinks come in pairs, so the Gaussian lives on even counts.
    let seeds = PointSeeds { generation: None, bootstrap: None };
    finish_point(tau, 0, 1, length, cumulants, dist, 2, seeds, with_boltzmann)
}

fn run_theory(config: &CampaignConfig) -> Result<Report> {
    let length = config.instance.length;
    let results: Vec<Result<PointReport>> = config
        .time_grid
        .par_iter()
        .map(|&tau| theory_point(length, tau, config.analysis.boltzmann))
        .collect();
    assemble(config, length, "tau", &config.time_grid, results, None)
}

fn svmc_params(config: &CampaignConfig) -> Result<SvmcParams> {
    let section = config.svmc.as_ref().ok_or_else(|| Error::Config("missing [svmc] section".into()))?;
    let schedule = AnnealSchedule::load(&section.schedule)?;
    SvmcParams::new(schedule, section.temperature()?, section.n0, 1.0, section.samples, config.seed)
}

/// The chain used by svmc campaigns.
pub fn campaign_instance(config: &CampaignConfig) -> Result<Arc<ChainInstance>> {
    let spec = &config.instance;
    Ok(Arc::new(ChainInstance::uniform(
        format!("{}-chain", config.name),
        spec.length,
        spec.coupling,
        spec.gauge_seed,
    )?))
}

fn run_svmc(config: &CampaignConfig) -> Result<(Report, Vec<SampleSet>)> {
    let base = svmc_params(config)?;
    let instance = campaign_instance(config)?;
    let length = instance.len();
    let bootstrap = config.analysis.bootstrap;
    let outcomes: Vec<Result<(PointReport, SampleSet)>> = config
        .time_grid
        .par_iter()
        .enumerate()
        .map(|(i, &ta)| {
            let mut params = base.with_ta_prime(ta)?;
            params.seed = generation_seed(config.seed, i);
            let set = svmc_anneal(&instance, &params)?;
            let seeds = PointSeeds { generation: Some(params.seed), bootstrap: Some(bootstrap_seed(config.seed, i)) };
            let point =
                analyze_counts(ta, &set.kink_counts(), length, 1, bootstrap, seeds, config.analysis.boltzmann)?;
            Ok((point, set))
        })
        .collect();
    let mut sets = Vec::new();
    let results = outcomes
        .into_iter()
        .map(|r| {
            r.map(|(p, s)| {
                sets.push(s);
                p
            })
        })
        .collect();
    let device = schedule_device(config);
    let report = assemble(config, length, "t'_a", &config.time_grid, results, device)?;
    Ok((report, sets))
}

/// The configured device, else the one a built-in schedule is named after.
fn schedule_device(config: &CampaignConfig) -> Option<Device> {
    if let Some(spec) = &config.analysis.device {
        return Device::parse(spec).ok();
    }
    let name = config.svmc.as_ref()?.schedule.as_str();
    if name.contains("nasa") {
        Some(Device::nasa())
    } else if name.contains("burnaby") {
        Some(Device::burnaby())
    } else {
        None
    }
}

/// Pools the kink counts of all sets that share an annealing time, in the
/// order given. Returns (time, counts, instance count) sorted by time.
pub fn pool_by_time(sets: &[SampleSet]) -> Vec<(f64, Vec<usize>, usize)> {
    let mut pooled: Vec<(f64, Vec<usize>, usize)> = Vec::new();
    for set in sets {
        let t = set.anneal_time();
        match pooled.iter_mut().find(|(pt, _, _)| *pt == t) {
            Some((_, counts, n)) => {
                counts.extend(set.kink_counts());
                *n += 1;
            }
            None => pooled.push((t, set.kink_counts(), 1)),
        }
    }
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    pooled
}

fn run_ingest(config: &CampaignConfig) -> Result<(Report, Vec<SampleSet>)> {
    let section = config.ingest.as_ref().ok_or_else(|| Error::Config("missing [ingest] section".into()))?;
    let source = match &section.instances {
        Some(path) => InstanceSource::from_records_path(path)?,
        None => InstanceSource::Uniform(config.instance.coupling),
    };
    let sets = ingest_samples(&section.path, &source)?;
    let length = sets[0].instance().len();
    if let Some(other) = sets.iter().find(|s| s.instance().len() != length) {
        return Err(Error::invalid(
            "ingest",
            format!("mixed chain lengths {length} and {} in one campaign", other.instance().len()),
        ));
    }
    let pooled = pool_by_time(&sets);
    let grid: Vec<f64> = if config.time_grid.is_empty() {
        pooled.iter().map(|p| p.0).collect()
    } else {
        config.time_grid.clone()
    };
    let results: Vec<Result<PointReport>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            let (_, counts, instances) = pooled
                .iter()
                .find(|p| p.0 == t)
                .ok_or_else(|| Error::invalid("ingest", format!("no samples at anneal time {t}")))?;
            let seeds = PointSeeds { generation: None, bootstrap: Some(bootstrap_seed(config.seed, i)) };
            analyze_counts(t, counts, length, *instances, config.analysis.bootstrap, seeds, config.analysis.boltzmann)
        })
        .collect();
    let device = config.analysis.device.as_deref().map(Device::parse).transpose()?;
    let report = assemble(config, length, "anneal_time", &grid, results, device)?;
    Ok((report, sets))
}

fn in_range(t: f64, range: Option<[f64; 2]>) -> bool {
    range.is_none_or(|[lo, hi]| t >= lo && t <= hi)
}

/// Cross-point fits over completed points: power laws of ρ and κ₁..κ₃,
/// constant fits of the ratios, effective temperature and the trace-norm
/// decay series. Fits that cannot be made are skipped with a note.
pub fn fit_points(
    points: &[PointReport],
    fit_range: Option<[f64; 2]>,
    exact: bool,
    notes: &mut Vec<String>,
) -> (Option<FitResult>, CumulantFits, RatioFits) {
    let range = fit_range.map(|[lo, hi]| (lo, hi));
    let mut power = |label: &str, pick: fn(&PointReport) -> f64| -> Option<FitResult> {
        let pts: Vec<FitPoint> =
            points.iter().map(|p| FitPoint::new(p.time, pick(p))).filter(|p| p.y > 0.0).collect();
        match fit_power_law(&pts, range, Weighting::Unweighted) {
            Ok(fit) => Some(fit),
            Err(e) => {
                notes.push(format!("{label} power-law fit skipped: {e}"));
                None
            }
        }
    };
    let density = power("density", |p| p.kink_density.point);
    let cumulant_fits = CumulantFits {
        k1: power("k1", |p| p.cumulants.k1.point),
        k2: power("k2", |p| p.cumulants.k2.point),
        k3: power("k3", |p| p.cumulants.k3.point),
    };
    let mut constant = |label: &str, pick: fn(&PointReport) -> Option<Interval>| -> Option<FitResult> {
        // Exact points carry no error bar and are weighted equally.
        let pts: Vec<(f64, f64, f64)> = points
            .iter()
            .filter(|p| in_range(p.time, fit_range))
            .filter_map(|p| pick(p).map(|r| (p.time, r.point, if exact { 1.0 } else { r.half_width() })))
            .collect();
        match fit_constant(&pts) {
            Ok(fit) => Some(fit),
            Err(e) => {
                notes.push(format!("{label} constant fit skipped: {e}"));
                None
            }
        }
    };
    let ratio_fits = RatioFits {
        ratio21: constant("k2/k1", |p| p.cumulants.ratio21),
        ratio31: constant("k3/k1", |p| p.cumulants.ratio31),
    };
    (density, cumulant_fits, ratio_fits)
}

/// Reference time for the decay series: the configured one, else the last
/// point inside the fit range.
fn reference_point<'a>(points: &'a [PointReport], config: &CampaignConfig) -> Option<&'a PointReport> {
    match config.analysis.reference_time {
        Some(t) => points.iter().find(|p| p.time == t),
        None => points.iter().rev().find(|p| in_range(p.time, config.analysis.fit_range)),
    }
}

fn assemble(
    config: &CampaignConfig,
    length: usize,
    time_unit: &str,
    grid: &[f64],
    results: Vec<Result<PointReport>>,
    device: Option<Device>,
) -> Result<Report> {
    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut first_error = None;
    for (&time, result) in grid.iter().zip(results) {
        match result {
            Ok(p) => points.push(p),
            Err(e) => {
                failures.push(PointFailure { time, error: e.to_string() });
                first_error.get_or_insert(e);
            }
        }
    }
    if points.is_empty() {
        return Err(first_error.unwrap_or_else(|| Error::Config("campaign has no time points".into())));
    }
    let mut notes = Vec::new();
    if config.mode != Mode::Theory {
        notes.push("error bars are 68% percentile-bootstrap intervals".into());
    }
    let (density_fit, cumulant_fits, ratio_fits) =
        fit_points(&points, config.analysis.fit_range, config.mode == Mode::Theory, &mut notes);

    let reference = reference_point(&points, config);
    let effective_temperature = match (reference.and_then(|p| p.beta_fit.as_ref()), &device) {
        (Some(fit), Some(device)) => BoltzmannModel::new(length, fit.beta_tn)
            .ok()
            .map(|m| m.effective_temperature(device)),
        _ => None,
    };
    let decay = match reference.and_then(|p| p.beta_fit.as_ref().map(|b| (p.time, b.beta_tn))) {
        Some((reference_time, beta_prime)) => {
            let series_in: Vec<(f64, KinkDistribution)> =
                points.iter().map(|p| (p.time, p.histogram.clone())).collect();
            let series = tn_decay_series(&series_in, length, beta_prime)?;
            let positive: Vec<(f64, f64)> = series.iter().copied().filter(|&(_, d)| d > 0.0).collect();
            let fit = match fit_decay_shape(&positive) {
                Ok(f) => Some(f),
                Err(e) => {
                    notes.push(format!("decay-shape fit skipped: {e}"));
                    None
                }
            };
            Some(DecaySeries { reference_time, beta_prime, series, fit })
        }
        None => {
            if config.analysis.boltzmann {
                notes.push("decay series skipped: no Boltzmann fit at the reference time".into());
            }
            None
        }
    };

    Ok(Report {
        name: config.name.clone(),
        mode: config.mode,
        length,
        time_unit: time_unit.into(),
        points,
        density_fit,
        cumulant_fits,
        ratio_fits,
        effective_temperature,
        decay,
        failures,
        notes,
        provenance: Provenance {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            config_hash: config.hash(),
            master_seed: config.seed,
            seed_scheme: SEED_SCHEME.into(),
            generated_at: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::config::InstanceSpec;

    fn theory_config(grid: Vec<f64>) -> CampaignConfig {
        let mut c = CampaignConfig::preset("desk-theory").unwrap();
        c.instance = InstanceSpec { length: 400, ..InstanceSpec::default() };
        c.time_grid = grid;
        c.analysis.fit_range = None;
        c
    }

    #[test]
    fn theory_campaign_slope() {
        let grid: Vec<f64> = (0..9).map(|i| 10f64.powf(1.0 + i as f64 * 0.125)).collect();
        let c = theory_config(grid);
        let r = run_campaign(&c).unwrap();
        assert_eq!(r.points.len(), 9);
        assert!(r.failures.is_empty());
        let alpha = r.density_fit.as_ref().unwrap().value("alpha");
        assert!((alpha - 0.5).abs() < 0.01, "alpha {alpha}");
        let r21 = r.ratio_fits.ratio21.as_ref().unwrap().value("constant");
        assert!((r21 - (2.0 - 2f64.sqrt())).abs() < 0.01, "{r21}");
        assert!(r.decay.is_some());
    }

    #[test]
    fn partial_failure_is_recorded() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let mut text = String::from("instance_id,anneal_time,spins\n");
        for i in 0..20 {
            let cfg: String = (0..8).map(|j| if (i + j) % 3 == 0 { '+' } else { '-' }).collect();
            text.push_str(&format!("a,1,{cfg}\n"));
        }
        std::fs::write(&path, text).unwrap();
        let mut c = CampaignConfig::preset("desk-theory").unwrap();
        c.mode = Mode::Ingest;
        c.ingest = Some(crate::campaign::config::IngestSection { path: path.clone(), instances: None });
        c.time_grid = vec![1.0, 2.0];
        c.analysis.fit_range = None;
        c.analysis.bootstrap = 100;
        let r = run_campaign(&c).unwrap();
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].time, 2.0);
        assert!(r.is_partial());
        c.time_grid = vec![3.0];
        assert!(run_campaign(&c).is_err());
    }

    #[test]
    fn seeds_are_distinct_per_point_and_role() {
        let g: Vec<u64> = (0..50).map(|i| generation_seed(7, i)).collect();
        let b: Vec<u64> = (0..50).map(|i| bootstrap_seed(7, i)).collect();
        let mut all: Vec<u64> = g.iter().chain(&b).copied().collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 100);
    }
}
