//! Write a sample file, read it back and analyze it as an ingest campaign.

use std::fs::File;
use std::sync::Arc;

use kinkstat::campaign::{run_campaign, CampaignConfig, IngestSection, Mode};
use kinkstat::model::{write_samples_csv, AnnealSchedule, ChainInstance, CouplingKind};
use kinkstat::svmc::{svmc_anneal, SvmcParams};
use kinkstat::units::Temperature;

fn main() -> kinkstat::Result<()> {
    let dir = std::env::temp_dir().join("kinkstat-ingest-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("samples.csv");

    let chain = Arc::new(ChainInstance::uniform("af-60", 60, CouplingKind::Antiferro, 0)?);
    let schedule = AnnealSchedule::preset("linear-nasa")?;
    let mut sets = Vec::new();
    for (i, ta) in [1.0, 2.0, 4.0, 8.0].into_iter().enumerate() {
        let p = SvmcParams::new(schedule.clone(), Temperature::millikelvin(12.1), 300, ta, 60, i as u64)?;
        sets.push(svmc_anneal(&chain, &p)?);
    }
    write_samples_csv(File::create(&path)?, &sets)?;

    let mut config = CampaignConfig::preset("desk-theory")?;
    config.name = "ingest-example".into();
    config.mode = Mode::Ingest;
    config.time_grid.clear();
    config.ingest = Some(IngestSection { path: path.clone(), instances: None });
    config.analysis.fit_range = None;
    config.analysis.bootstrap = 500;
    let report = run_campaign(&config)?;
    for p in &report.points {
        println!("t = {:<4} density {:.4} [{:.4}, {:.4}]", p.time, p.kink_density.point, p.kink_density.low, p.kink_density.high);
    }
    if let Some(fit) = &report.density_fit {
        println!("alpha = {:.3} ± {:.3}", fit.value("alpha"), fit.stderr("alpha"));
    }
    Ok(())
}
