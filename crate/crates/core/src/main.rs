//! Command-line front end. Every subcommand is a thin wrapper over the
//! library; exit codes are 0 on success, 1 for invalid input, 2 for runtime
//! failures and 3 when a campaign completed with failed points.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};

use kinkstat::boltzmann::{beta_from_density, fit_beta, BoltzmannModel};
use kinkstat::campaign::{
    emit_report, pool_by_time, run_campaign_with_samples, AnalysisSection, CampaignConfig, IngestSection,
    InstanceSource, Mode, Report, ReportFormat,
};
use kinkstat::embedding::{generate_instances, ChimeraGraph};
use kinkstat::model::{write_samples_csv, AnnealSchedule, ChainInstance, CouplingKind};
use kinkstat::stats::histogram;
use kinkstat::svmc::{svmc_anneal, SvmcParams};
use kinkstat::theory::{kink_distribution, QuenchParams};
use kinkstat::units::{Device, Temperature};
use kinkstat::{Error, Result};

#[derive(Parser)]
#[command(name = "kinkstat", version, about = "Kink statistics of annealed transverse-field Ising chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate chain instances embedded in a Chimera graph by self-avoiding walks.
    Embed(EmbedArgs),
    /// Anneal a chain with spin-vector Monte Carlo and write the final spins.
    Svmc(SvmcArgs),
    /// Exact closed-system kink cumulants over a list of tau values.
    Theory(TheoryArgs),
    /// Cumulants, fits and Boltzmann analysis of a sample CSV.
    Analyze(AnalyzeArgs),
    /// Effective inverse temperature per annealing time of a sample CSV.
    BoltzmannFit(BoltzmannArgs),
    /// Re-emit a report JSON in another format.
    Report(ReportArgs),
    /// Run a campaign from a TOML file or a built-in preset.
    Campaign(CampaignArgs),
}

#[derive(Args)]
struct EmbedArgs {
    /// Chimera grid size ℓ (ℓ×ℓ unit cells).
    #[arg(long)]
    cells: usize,
    /// Chain length L.
    #[arg(long)]
    length: usize,
    /// Number of instances.
    #[arg(long, default_value_t = 1)]
    instances: usize,
    /// Coupling sign of the chains.
    #[arg(long, value_enum, default_value_t = CouplingArg::Antiferro)]
    coupling: CouplingArg,
    /// Master seed; instance i uses split(seed, i).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Walks tried per instance before giving up.
    #[arg(long, default_value_t = 10_000)]
    max_retries: usize,
    /// Output JSON file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CouplingArg {
    Ferro,
    Antiferro,
    Gauge,
}

impl From<CouplingArg> for CouplingKind {
    fn from(c: CouplingArg) -> Self {
        match c {
            CouplingArg::Ferro => CouplingKind::Ferro,
            CouplingArg::Antiferro => CouplingKind::Antiferro,
            CouplingArg::Gauge => CouplingKind::Gauge,
        }
    }
}

#[derive(Args)]
struct SvmcArgs {
    /// Built-in schedule (linear, linear-nasa, linear-burnaby, nasa-approx,
    /// burnaby-approx) or a schedule CSV with header s,A_GHz,B_GHz.
    #[arg(long, default_value = "linear-nasa")]
    schedule: String,
    /// Physical temperature in mK, for GHz schedules.
    #[arg(long = "temp-mK", alias = "temperature-mk", conflicts_with = "temperature_reduced")]
    temperature_mk: Option<f64>,
    /// k_B T in schedule units, for reduced schedules.
    #[arg(long = "temp-reduced", alias = "temperature-reduced")]
    temperature_reduced: Option<f64>,
    /// Sweeps per unit of t'_a.
    #[arg(long, default_value_t = kinkstat::svmc::N0_NASA)]
    n0: u32,
    /// Comma-separated t'_a values.
    #[arg(long = "ta-prime", alias = "ta-list", value_delimiter = ',', required = true)]
    ta_list: Vec<f64>,
    /// Samples per t'_a.
    #[arg(long, default_value_t = kinkstat::svmc::DEFAULT_SAMPLES)]
    samples: usize,
    /// Chain length, for a uniform chain.
    #[arg(long, default_value_t = 200)]
    length: usize,
    /// Coupling sign of the uniform chain.
    #[arg(long, value_enum, default_value_t = CouplingArg::Antiferro)]
    coupling: CouplingArg,
    /// Instance JSON from `embed`; its first instance replaces the uniform
    /// chain.
    #[arg(long)]
    instances: Option<PathBuf>,
    /// Master seed; t'_a value i uses split(seed, i), sample k of it a
    /// further split by k.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output sample CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TheoryArgs {
    /// Chain length (even).
    #[arg(long = "L", visible_alias = "length")]
    length: usize,
    /// Comma-separated dimensionless tau values.
    #[arg(long, value_delimiter = ',', required = true)]
    tau_list: Vec<f64>,
    /// Output CSV of cumulants and ratios.
    #[arg(long)]
    out: PathBuf,
    /// Also write the full kink PMF for every tau into this CSV.
    #[arg(long)]
    pmf_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupBy {
    #[value(name = "anneal_time")]
    AnnealTime,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Sample CSV with columns instance_id,anneal_time,spins.
    #[arg(long = "in")]
    input: PathBuf,
    /// Grouping of samples into time points.
    #[arg(long, value_enum, default_value_t = GroupBy::AnnealTime)]
    group_by: GroupBy,
    /// Bootstrap resamples.
    #[arg(long, default_value_t = kinkstat::stats::DEFAULT_RESAMPLES)]
    bootstrap: usize,
    /// Fit range a:b (inclusive) for power-law and ratio fits.
    #[arg(long, value_parser = parse_range)]
    fit_range: Option<[f64; 2]>,
    /// Instance JSON from `embed`; otherwise chains are uniform.
    #[arg(long)]
    instances: Option<PathBuf>,
    /// Coupling of uniform chains.
    #[arg(long, value_enum, default_value_t = CouplingArg::Antiferro)]
    coupling: CouplingArg,
    /// Device for kelvin temperatures: nasa, burnaby or custom:B1HALF_GHZ,T_K.
    #[arg(long)]
    device: Option<String>,
    /// Time whose fitted β′ is held fixed in the trace-norm decay series.
    #[arg(long)]
    reference_time: Option<f64>,
    /// Bootstrap seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output report JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BoltzmannArgs {
    /// Sample CSV with columns instance_id,anneal_time,spins.
    #[arg(long = "in")]
    input: PathBuf,
    /// Instance JSON from `embed`; otherwise chains are uniform.
    #[arg(long)]
    instances: Option<PathBuf>,
    /// Coupling of uniform chains.
    #[arg(long, value_enum, default_value_t = CouplingArg::Antiferro)]
    coupling: CouplingArg,
    /// Device for kelvin temperatures: nasa, burnaby or custom:B1HALF_GHZ,T_K.
    #[arg(long, default_value = "nasa")]
    device: String,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Report JSON written by `analyze` or `campaign`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value_t = ReportFormat::MarkdownTable)]
    format: ReportFormat,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CampaignArgs {
    /// Campaign TOML file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset: desk-theory, desk-svmc-L200 or desk-boltzmann.
    #[arg(long)]
    preset: Option<String>,
    /// Overrides the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to the config's output_dir, then
    /// ./<name>.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Formats to write (repeatable); all three by default.
    #[arg(long, value_enum)]
    format: Vec<ReportFormat>,
    /// Also write the generated samples as samples.csv.
    #[arg(long)]
    write_samples: bool,
}

fn parse_range(s: &str) -> std::result::Result<[f64; 2], String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got '{s}'"))?;
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("'{x}' is not a number"));
    Ok([parse(a)?, parse(b)?])
}

fn timestamp() -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format!("unix:{secs}")
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn create_file(path: &Path) -> Result<fs::File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(fs::File::create(path)?)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::Writer::from_writer(create_file(path)?))
}

fn instance_source(instances: &Option<PathBuf>, coupling: CouplingArg) -> Result<InstanceSource> {
    match instances {
        Some(p) => InstanceSource::from_records_path(p),
        None => Ok(InstanceSource::Uniform(coupling.into())),
    }
}

fn embed(args: EmbedArgs) -> Result<()> {
    let graph = ChimeraGraph::new(args.cells)?;
    let records =
        generate_instances(&graph, args.length, args.instances, args.coupling.into(), args.seed, args.max_retries)?;
    let mut text = serde_json::to_string_pretty(&records)?;
    text.push('\n');
    write_output(args.out.as_deref(), &text)?;
    eprintln!("embedded {} chains of length {} in a {}x{} Chimera graph", records.len(), args.length, args.cells, args.cells);
    Ok(())
}

fn svmc(args: SvmcArgs) -> Result<()> {
    let schedule = AnnealSchedule::load(&args.schedule)?;
    let temperature = match (args.temperature_mk, args.temperature_reduced) {
        (Some(mk), None) => Temperature::millikelvin(mk),
        (None, Some(t)) => Temperature::Reduced(t),
        _ => return Err(Error::Config("give exactly one of --temp-mK and --temp-reduced".into())),
    };
    let instance = match &args.instances {
        Some(path) => match InstanceSource::from_records_path(path)? {
            InstanceSource::Known(list) if !list.is_empty() => list[0].clone(),
            _ => return Err(Error::Config(format!("{} holds no instances", path.display()))),
        },
        None => Arc::new(ChainInstance::uniform("chain-0", args.length, args.coupling.into(), args.seed)?),
    };
    let base = SvmcParams::new(schedule, temperature, args.n0, 1.0, args.samples, args.seed)?;
    let mut sets = Vec::with_capacity(args.ta_list.len());
    for (i, &ta) in args.ta_list.iter().enumerate() {
        let mut params = base.with_ta_prime(ta)?;
        params.seed = kinkstat::seed::split(args.seed, i as u64);
        let set = svmc_anneal(&instance, &params)?;
        let mean = set.kink_counts().iter().sum::<usize>() as f64 / set.len() as f64;
        eprintln!("t'_a = {ta}: {} samples, mean kinks {mean:.3}", set.len());
        sets.push(set);
    }
    write_samples_csv(create_file(&args.out)?, &sets)
}

fn theory(args: TheoryArgs) -> Result<()> {
    let mut w = csv_writer(&args.out)?;
    w.write_record(["L", "tau", "k1", "k2", "k3", "ratio21", "ratio31"])?;
    let mut pmf = args.pmf_out.as_deref().map(csv_writer).transpose()?;
    if let Some(p) = pmf.as_mut() {
        p.write_record(["tau", "kinks", "probability"])?;
    }
    for &tau in &args.tau_list {
        let q = QuenchParams::new(args.length, tau)?;
        let dist = kink_distribution(&q)?;
        let c = dist.cumulants();
        let (r21, r31) = c.ratios().map(|(a, b)| (a.to_string(), b.to_string())).unwrap_or_default();
        w.write_record([
            args.length.to_string(),
            tau.to_string(),
            c.k1.to_string(),
            c.k2.to_string(),
            c.k3.to_string(),
            r21,
            r31,
        ])?;
        if let Some(p) = pmf.as_mut() {
            for (n, prob) in dist.iter() {
                p.write_record([tau.to_string(), n.to_string(), prob.to_string()])?;
            }
        }
    }
    w.flush()?;
    if let Some(mut p) = pmf {
        p.flush()?;
    }
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    let GroupBy::AnnealTime = args.group_by;
    let config = CampaignConfig {
        name: args.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "analysis".into()),
        mode: Mode::Ingest,
        seed: args.seed,
        time_grid: Vec::new(),
        instance: kinkstat::campaign::InstanceSpec { coupling: args.coupling.into(), ..Default::default() },
        svmc: None,
        ingest: Some(IngestSection { path: args.input.clone(), instances: args.instances.clone() }),
        analysis: AnalysisSection {
            bootstrap: args.bootstrap,
            fit_range: args.fit_range,
            reference_time: args.reference_time,
            device: args.device.clone(),
            boltzmann: true,
        },
        output_dir: None,
    };
    let (mut report, _) = run_campaign_with_samples(&config)?;
    report.provenance.generated_at = Some(timestamp());
    write_output(Some(&args.out), &report.to_json())?;
    summarize(&report);
    Ok(status(&report))
}

fn boltzmann_fit(args: BoltzmannArgs) -> Result<()> {
    let device = Device::parse(&args.device)?;
    let source = instance_source(&args.instances, args.coupling)?;
    let sets = kinkstat::campaign::ingest_samples(&args.input, &source)?;
    let length = sets[0].instance().len();
    if sets.iter().any(|s| s.instance().len() != length) {
        return Err(Error::Config("boltzmann-fit needs a single chain length".into()));
    }
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record([
        "anneal_time",
        "samples",
        "density",
        "beta_density",
        "beta_kl",
        "kl",
        "beta_tn",
        "tn",
        "inverse_beta",
        "kelvin",
    ])?;
    for (t, counts, _) in pool_by_time(&sets) {
        let hist = histogram(&counts)?;
        let density = hist.mean() / length as f64;
        let beta_density = beta_from_density(length, density).map(|b| b.to_string()).unwrap_or_default();
        let fit = fit_beta(&hist, length)?;
        let temp = BoltzmannModel::new(length, fit.beta_tn)?.effective_temperature(&device);
        out.write_record([
            t.to_string(),
            counts.len().to_string(),
            density.to_string(),
            beta_density,
            fit.beta_kl.to_string(),
            fit.kl.to_string(),
            fit.beta_tn.to_string(),
            fit.tn.to_string(),
            temp.reduced.to_string(),
            temp.kelvin.to_string(),
        ])?;
    }
    let bytes = out.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_output(args.out.as_deref(), &String::from_utf8_lossy(&bytes))
}

fn report(args: ReportArgs) -> Result<()> {
    let report = Report::load(&args.input)?;
    for path in emit_report(&report, args.format, &args.out)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn campaign(args: CampaignArgs) -> Result<ExitCode> {
    let mut config = match (&args.config, &args.preset) {
        (Some(path), _) => CampaignConfig::from_path(path)?,
        (None, Some(name)) => CampaignConfig::preset(name)?,
        (None, None) => return Err(Error::Config("give --config or --preset".into())),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out = args
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(&config.name));
    eprintln!("campaign {} ({:?}, {} points) -> {}", config.name, config.mode, config.time_grid.len(), out.display());
    let (mut report, samples) = run_campaign_with_samples(&config)?;
    report.provenance.generated_at = Some(timestamp());
    let formats = if args.format.is_empty() {
        vec![ReportFormat::Json, ReportFormat::CsvBundle, ReportFormat::MarkdownTable]
    } else {
        args.format.clone()
    };
    for format in formats {
        emit_report(&report, format, &out)?;
    }
    fs::write(out.join("campaign.toml"), config.to_toml_string())?;
    if args.write_samples && !samples.is_empty() {
        write_samples_csv(fs::File::create(out.join("samples.csv"))?, &samples)?;
    }
    summarize(&report);
    Ok(status(&report))
}

fn summarize(report: &Report) {
    if let Some(fit) = &report.density_fit {
        eprintln!(
            "alpha = {} over [{}, {}] ({} points)",
            kinkstat::campaign::format_pm(fit.value("alpha"), fit.stderr("alpha")),
            fit.range.0,
            fit.range.1,
            fit.n_points
        );
    }
    for f in &report.failures {
        eprintln!("point {} failed: {}", f.time, f.error);
    }
}

fn status(report: &Report) -> ExitCode {
    if report.is_partial() {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Embed(a) => embed(a).map(|_| ExitCode::SUCCESS),
        Command::Svmc(a) => svmc(a).map(|_| ExitCode::SUCCESS),
        Command::Theory(a) => theory(a).map(|_| ExitCode::SUCCESS),
        Command::Analyze(a) => analyze(a),
        Command::BoltzmannFit(a) => boltzmann_fit(a).map(|_| ExitCode::SUCCESS),
        Command::Report(a) => report(a).map(|_| ExitCode::SUCCESS),
        Command::Campaign(a) => campaign(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
