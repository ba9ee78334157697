use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::Mode;
use crate::boltzmann::{BetaFit, EffectiveTemperature};
use crate::stats::{CumulantEstimate, DecayFit, FitResult, Interval};
use crate::theory::KinkDistribution;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub mode: Mode,
    /// Chain length shared by every point.
    pub length: usize,
    /// What the time axis means: "t'_a", "tau" or "anneal_time".
    pub time_unit: String,
    pub points: Vec<PointReport>,
    /// Power-law fit ρ ∝ t^−α of the mean kink density.
    pub density_fit: Option<FitResult>,
    pub cumulant_fits: CumulantFits,
    pub ratio_fits: RatioFits,
    pub effective_temperature: Option<EffectiveTemperature>,
    pub decay: Option<DecaySeries>,
    pub failures: Vec<PointFailure>,
    /// Analysis steps that were skipped, with the reason.
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub time: f64,
    /// Configurations behind the point; 0 for exact theory points.
    pub n_samples: usize,
    pub instances: usize,
    pub kink_density: Interval,
    pub cumulants: CumulantEstimate,
    pub histogram: KinkDistribution,
    /// Total-variation distance to the Gaussian with variance (2 − √2)κ₁.
    pub gaussian_tv: Option<f64>,
    pub beta_fit: Option<BetaFit>,
    pub seeds: PointSeeds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSeeds {
    pub generation: Option<u64>,
    pub bootstrap: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantFits {
    pub k1: Option<FitResult>,
    pub k2: Option<FitResult>,
    pub k3: Option<FitResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioFits {
    pub ratio21: Option<FitResult>,
    pub ratio31: Option<FitResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecaySeries {
    pub reference_time: f64,
    /// β′ held fixed along the series: the trace-norm fit at the reference
    /// time.
    pub beta_prime: f64,
    pub series: Vec<(f64, f64)>,
    pub fit: Option<DecayFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub time: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub config_hash: String,
    pub master_seed: u64,
    pub seed_scheme: String,
    /// Set by the command-line tool only, so library output stays
    /// reproducible.
    pub generated_at: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Json,
    CsvBundle,
    MarkdownTable,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Same report with the timestamp removed, for comparisons.
    pub fn without_timestamp(&self) -> Self {
        let mut r = self.clone();
        r.provenance.generated_at = None;
        r
    }

    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty()
    }

    pub fn point(&self, time: f64) -> Option<&PointReport> {
        self.points.iter().find(|p| p.time == time)
    }
}

/// `value±stderr` with three decimals.
pub fn format_pm(value: f64, stderr: f64) -> String {
    format!("{value:.3}±{stderr:.3}")
}

/// Writes the report into `dir` and returns the files written.
///
/// - json: `report.json`
/// - csv-bundle: `points.csv`, `fits.csv`, `decay.csv` and one
///   `histograms/hist_NNN.csv` per time point
/// - markdown-table: `report.md`
pub fn emit_report(report: &Report, format: ReportFormat, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    match format {
        ReportFormat::Json => {
            let path = dir.join("report.json");
            fs::write(&path, report.to_json())?;
            Ok(vec![path])
        }
        ReportFormat::MarkdownTable => {
            let path = dir.join("report.md");
            fs::write(&path, markdown(report))?;
            Ok(vec![path])
        }
        ReportFormat::CsvBundle => csv_bundle(report, dir),
    }
}

fn fit_rows(report: &Report) -> Vec<(&'static str, &FitResult)> {
    let mut rows = Vec::new();
    let named = [
        ("density", report.density_fit.as_ref()),
        ("k1", report.cumulant_fits.k1.as_ref()),
        ("k2", report.cumulant_fits.k2.as_ref()),
        ("k3", report.cumulant_fits.k3.as_ref()),
        ("k2/k1", report.ratio_fits.ratio21.as_ref()),
        ("k3/k1", report.ratio_fits.ratio31.as_ref()),
    ];
    for (name, fit) in named {
        if let Some(fit) = fit {
            rows.push((name, fit));
        }
    }
    if let Some(d) = report.decay.as_ref().and_then(|d| d.fit.as_ref()) {
        rows.push(("decay-power", &d.power));
        rows.push(("decay-exponential", &d.exponential));
    }
    rows
}

fn markdown(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {}\n", report.name);
    let _ = writeln!(s, "mode: {:?}, L = {}, config {}\n", report.mode, report.length, report.provenance.config_hash);
    let _ = writeln!(s, "| quantity | parameter | value | range | points |");
    let _ = writeln!(s, "|---|---|---|---|---|");
    for (name, fit) in fit_rows(report) {
        for p in &fit.params {
            let _ = writeln!(
                s,
                "| {name} | {} | {} | {}–{} | {} |",
                p.name,
                format_pm(p.value, p.stderr),
                fit.range.0,
                fit.range.1,
                fit.n_points
            );
        }
    }
    if let Some(t) = &report.effective_temperature {
        let _ = writeln!(s, "\nβ′ = {:.3} (1/β′ = {:.3}, {:.1} mK on {})", t.beta_prime, t.reduced, t.kelvin * 1e3, t.device);
    }
    let _ = writeln!(s, "\n| {} | samples | ρ | κ₁ | κ₂/κ₁ | κ₃/κ₁ | β′ |", report.time_unit);
    let _ = writeln!(s, "|---|---|---|---|---|---|---|");
    let ci = |i: &Interval| format_pm(i.point, i.half_width());
    for p in &report.points {
        let ratio = |r: &Option<Interval>| r.as_ref().map(ci).unwrap_or_else(|| "-".into());
        let beta = p.beta_fit.as_ref().map(|b| format!("{:.3}", b.beta_tn)).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "| {} | {} | {:.5} | {} | {} | {} | {beta} |",
            p.time,
            p.n_samples,
            p.kink_density.point,
            ci(&p.cumulants.k1),
            ratio(&p.cumulants.ratio21),
            ratio(&p.cumulants.ratio31),
        );
    }
    if !report.failures.is_empty() {
        let _ = writeln!(s, "\nfailed points:");
        for f in &report.failures {
            let _ = writeln!(s, "- {}: {}", f.time, f.error);
        }
    }
    for n in &report.notes {
        let _ = writeln!(s, "\nnote: {n}");
    }
    s
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_bundle(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();

    let path = dir.join("points.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record([
        "time", "n_samples", "instances", "density", "density_low", "density_high", "k1", "k1_low", "k1_high", "k2",
        "k2_low", "k2_high", "k3", "k3_low", "k3_high", "ratio21", "ratio21_low", "ratio21_high", "ratio31",
        "ratio31_low", "ratio31_high", "gaussian_tv", "beta_kl", "kl", "beta_tn", "tn",
    ])?;
    for p in &report.points {
        let c = &p.cumulants;
        let mut row = vec![p.time.to_string(), p.n_samples.to_string(), p.instances.to_string()];
        for i in [Some(&p.kink_density), Some(&c.k1), Some(&c.k2), Some(&c.k3), c.ratio21.as_ref(), c.ratio31.as_ref()] {
            row.extend([opt(i.map(|i| i.point)), opt(i.map(|i| i.low)), opt(i.map(|i| i.high))]);
        }
        let b = p.beta_fit.as_ref();
        row.extend([
            opt(p.gaussian_tv),
            opt(b.map(|b| b.beta_kl)),
            opt(b.map(|b| b.kl)),
            opt(b.map(|b| b.beta_tn)),
            opt(b.map(|b| b.tn)),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    written.push(path);

    let path = dir.join("fits.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["quantity", "kind", "param", "value", "stderr", "range_low", "range_high", "n_points", "residual"])?;
    for (name, fit) in fit_rows(report) {
        for p in &fit.params {
            w.write_record([
                name.to_string(),
                format!("{:?}", fit.kind),
                p.name.clone(),
                p.value.to_string(),
                p.stderr.to_string(),
                fit.range.0.to_string(),
                fit.range.1.to_string(),
                fit.n_points.to_string(),
                fit.residual.to_string(),
            ])?;
        }
    }
    w.flush()?;
    written.push(path);

    let path = dir.join("decay.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["time", "trace_norm"])?;
    for (t, d) in report.decay.iter().flat_map(|d| d.series.iter()) {
        w.write_record([t.to_string(), d.to_string()])?;
    }
    w.flush()?;
    written.push(path);

    let hist_dir = dir.join("histograms");
    fs::create_dir_all(&hist_dir)?;
    for (i, p) in report.points.iter().enumerate() {
        let path = hist_dir.join(format!("hist_{i:03}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["time", "kinks", "probability"])?;
        for (n, prob) in p.histogram.iter() {
            w.write_record([p.time.to_string(), n.to_string(), prob.to_string()])?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{FitKind, FitParam};

    #[test]
    fn plus_minus_format() {
        assert_eq!(format_pm(0.204, 0.002), "0.204±0.002");
        assert_eq!(format_pm(0.20449, 0.00151), "0.204±0.002");
    }

    fn sample_report() -> Report {
        let fit = FitResult {
            kind: FitKind::PowerLaw,
            params: vec![
                FitParam { name: "alpha".into(), value: 0.204, stderr: 0.002 },
                FitParam { name: "intercept".into(), value: -3.0, stderr: 0.01 },
            ],
            range: (1.0, 100.0),
            n_points: 33,
            residual: 0.0,
        };
        Report {
            name: "t".into(),
            mode: Mode::Ingest,
            length: 800,
            time_unit: "anneal_time".into(),
            points: vec![],
            density_fit: Some(fit),
            cumulant_fits: CumulantFits { k1: None, k2: None, k3: None },
            ratio_fits: RatioFits { ratio21: None, ratio31: None },
            effective_temperature: None,
            decay: None,
            failures: vec![],
            notes: vec![],
            provenance: Provenance {
                tool_version: "0".into(),
                config_hash: "h".into(),
                master_seed: 0,
                seed_scheme: String::new(),
                generated_at: None,
            },
        }
    }

    #[test]
    fn markdown_row_for_exponent() {
        let report = sample_report();
        let md = markdown(&report);
        assert!(md.contains("| density | alpha | 0.204±0.002 | 1–100 | 33 |"), "{md}");
        let dir = tempfile::tempdir().unwrap();
        let files = emit_report(&report, ReportFormat::Json, dir.path()).unwrap();
        assert_eq!(Report::load(&files[0]).unwrap(), report);
    }

    #[test]
    fn unwritable_directory_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain");
        fs::write(&file, "x").unwrap();
        let err = emit_report(&sample_report(), ReportFormat::MarkdownTable, file.join("sub")).unwrap_err();
        assert!(matches!(err, Error::Io(_)), "{err}");
        assert!(!err.is_validation());
    }
}
