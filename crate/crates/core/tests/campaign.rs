use std::fs;
use std::sync::Arc;

use kinkstat::boltzmann::{fit_beta, tn_decay_series};
use kinkstat::campaign::{
    bootstrap_seed, emit_report, generation_seed, run_campaign, run_campaign_with_samples, CampaignConfig,
    IngestSection, Mode, Report, ReportFormat,
};
use kinkstat::model::{write_samples_csv, ChainInstance, CouplingKind, SampleSet, SampleSource, SpinConfig};
use kinkstat::seed;
use kinkstat::stats::{estimate_cumulants, fit_power_law, histogram, FitPoint, Weighting};
use kinkstat::svmc::{svmc_anneal, SvmcParams};
use rand::Rng;

/// Small svmc campaign that runs in about a second.
fn small_svmc() -> CampaignConfig {
    let mut c = CampaignConfig::preset("desk-svmc-L200").unwrap();
    c.name = "small".into();
    c.instance.length = 24;
    c.time_grid = vec![1.0, 2.0, 4.0, 8.0];
    c.svmc.as_mut().unwrap().samples = 40;
    c.svmc.as_mut().unwrap().n0 = 50;
    c.analysis.bootstrap = 200;
    c.analysis.fit_range = None;
    c
}

/// Synthetic sample file: three chains of length 30, kinks placed at random
/// with a rate that falls with the annealing time.
fn synthetic_file(dir: &std::path::Path) -> std::path::PathBuf {
    let mut rng = seed::rng(11);
    let mut sets = Vec::new();
    for id in ["c0", "c1", "c2"] {
        let inst = Arc::new(ChainInstance::uniform(id, 30, CouplingKind::Antiferro, 0).unwrap());
        for t in [1.0, 3.0, 10.0, 30.0, 100.0] {
            let rate = 0.3 * f64::powf(t, -0.5);
            let configs: Vec<SpinConfig> = (0..25)
                .map(|_| {
                    // Antiferro ground state with random domain walls.
                    let mut s = 1i8;
                    let mut signs = vec![s];
                    for _ in 1..30 {
                        s = if rng.random::<f64>() < rate { s } else { -s };
                        signs.push(s);
                    }
                    SpinConfig::from_signs(&signs).unwrap()
                })
                .collect();
            sets.push(SampleSet::new(inst.clone(), t, configs, SampleSource::Svmc).unwrap());
        }
    }
    let path = dir.join("samples.csv");
    write_samples_csv(fs::File::create(&path).unwrap(), &sets).unwrap();
    path
}

fn ingest_config(path: std::path::PathBuf) -> CampaignConfig {
    let mut c = CampaignConfig::preset("desk-theory").unwrap();
    c.name = "ingest".into();
    c.mode = Mode::Ingest;
    c.time_grid = Vec::new();
    c.ingest = Some(IngestSection { path, instances: None });
    c.analysis.fit_range = None;
    c.analysis.bootstrap = 300;
    c.seed = 99;
    c
}

#[test]
fn ingest_pipeline_equals_direct_module_calls() {
    let dir = tempfile::tempdir().unwrap();
    let path = synthetic_file(dir.path());
    let config = ingest_config(path.clone());
    let (report, sets) = run_campaign_with_samples(&config).unwrap();
    assert_eq!(sets.len(), 15);
    assert_eq!(report.points.len(), 5);
    assert_eq!(report.length, 30);

    // The same chain of calls, by hand.
    let text = fs::read_to_string(&path).unwrap();
    let mut by_time: Vec<(f64, Vec<usize>)> = Vec::new();
    for line in text.lines().skip(1) {
        let mut f = line.split(',');
        let (id, t, spins) = (f.next().unwrap(), f.next().unwrap(), f.next().unwrap());
        let t: f64 = t.parse().unwrap();
        let inst = ChainInstance::uniform(id, 30, CouplingKind::Antiferro, 0).unwrap();
        let k = kinkstat::model::count_kinks(&inst, &spins.parse().unwrap()).unwrap();
        match by_time.iter_mut().find(|(bt, _)| *bt == t) {
            Some((_, v)) => v.push(k),
            None => by_time.push((t, vec![k])),
        }
    }
    by_time.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut series = Vec::new();
    for (i, ((t, counts), point)) in by_time.iter().zip(&report.points).enumerate() {
        assert_eq!(point.time, *t);
        assert_eq!(point.instances, 3);
        let est = estimate_cumulants(counts, 300, bootstrap_seed(99, i)).unwrap();
        assert_eq!(point.cumulants, est);
        let hist = histogram(counts).unwrap();
        assert_eq!(point.histogram, hist);
        assert_eq!(point.beta_fit.as_ref(), Some(&fit_beta(&hist, 30).unwrap()));
        assert_eq!(point.kink_density.point, est.k1.point / 30.0);
        series.push((*t, hist));
    }
    let pts: Vec<FitPoint> = report.points.iter().map(|p| FitPoint::new(p.time, p.kink_density.point)).collect();
    assert_eq!(report.density_fit.as_ref(), Some(&fit_power_law(&pts, None, Weighting::Unweighted).unwrap()));
    let decay = report.decay.as_ref().unwrap();
    assert_eq!(decay.reference_time, 100.0);
    let beta = report.points[4].beta_fit.as_ref().unwrap().beta_tn;
    assert_eq!(decay.series, tn_decay_series(&series, 30, beta).unwrap());
}

#[test]
fn svmc_pipeline_equals_direct_module_calls() {
    let config = small_svmc();
    let (report, sets) = run_campaign_with_samples(&config).unwrap();
    let svmc = config.svmc.as_ref().unwrap();
    let schedule = kinkstat::model::AnnealSchedule::load(&svmc.schedule).unwrap();
    let inst = Arc::new(ChainInstance::uniform("small-chain", 24, CouplingKind::Antiferro, 0).unwrap());
    for (i, &ta) in config.time_grid.iter().enumerate() {
        let params = SvmcParams::new(
            schedule.clone(),
            svmc.temperature().unwrap(),
            svmc.n0,
            ta,
            svmc.samples,
            generation_seed(config.seed, i),
        )
        .unwrap();
        let set = svmc_anneal(&inst, &params).unwrap();
        assert_eq!(set, sets[i]);
        let est = estimate_cumulants(&set.kink_counts(), 200, bootstrap_seed(config.seed, i)).unwrap();
        assert_eq!(report.points[i].cumulants, est);
        assert_eq!(report.points[i].seeds.generation, Some(params.seed));
    }
}

#[test]
fn same_seed_same_report() {
    let c = small_svmc();
    let a = run_campaign(&c).unwrap();
    let b = run_campaign(&c).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let mut other = c.clone();
    other.seed += 1;
    assert_ne!(run_campaign(&other).unwrap().points, a.points);
}

#[test]
fn emitted_formats() {
    let report = run_campaign(&small_svmc()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let json = emit_report(&report, ReportFormat::Json, dir.path()).unwrap();
    assert_eq!(Report::load(&json[0]).unwrap(), report);

    let files = emit_report(&report, ReportFormat::CsvBundle, dir.path()).unwrap();
    let hists = fs::read_dir(dir.path().join("histograms")).unwrap().count();
    assert_eq!(hists, report.points.len());
    assert!(files.iter().any(|f| f.ends_with("points.csv")));
    let points = fs::read_to_string(dir.path().join("points.csv")).unwrap();
    assert_eq!(points.lines().count(), report.points.len() + 1);

    emit_report(&report, ReportFormat::MarkdownTable, dir.path()).unwrap();
    let md = fs::read_to_string(dir.path().join("report.md")).unwrap();
    let alpha = report.density_fit.as_ref().unwrap();
    let row = kinkstat::campaign::format_pm(alpha.value("alpha"), alpha.stderr("alpha"));
    assert!(md.contains(&row), "{md}");
}

#[test]
fn theory_campaign_slope_over_two_decades() {
    let c = CampaignConfig::preset("desk-theory").unwrap();
    let r = run_campaign(&c).unwrap();
    let alpha = r.density_fit.as_ref().unwrap().value("alpha");
    assert!((alpha - 0.5).abs() < 0.005, "alpha = {alpha}");
    assert_eq!(r.points.len(), c.time_grid.len());
}

#[test]
fn config_file_round_trip_and_missing_paths() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    let c = small_svmc();
    fs::write(&path, c.to_toml_string()).unwrap();
    assert_eq!(CampaignConfig::from_path(&path).unwrap(), c);
    let bad = ingest_config(dir.path().join("nope.csv"));
    fs::write(&path, bad.to_toml_string()).unwrap();
    let err = CampaignConfig::from_path(&path).unwrap_err();
    assert!(err.is_validation());
}
