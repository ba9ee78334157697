//! Spin-vector Monte Carlo anneals of a uniform antiferromagnetic chain.

use std::sync::Arc;

use kinkstat::model::{AnnealSchedule, ChainInstance, CouplingKind};
use kinkstat::stats::estimate_cumulants;
use kinkstat::svmc::{svmc_anneal, SvmcParams};
use kinkstat::units::Temperature;

fn main() -> kinkstat::Result<()> {
    let chain = Arc::new(ChainInstance::uniform("af-100", 100, CouplingKind::Antiferro, 0)?);
    let schedule = AnnealSchedule::preset("linear-nasa")?;
    println!("t'_a   density   k2/k1");
    for (i, ta) in [1.0, 2.0, 4.0, 8.0].into_iter().enumerate() {
        let params = SvmcParams::new(schedule.clone(), Temperature::millikelvin(12.1), 500, ta, 100, i as u64)?;
        let set = svmc_anneal(&chain, &params)?;
        let est = estimate_cumulants(&set.kink_counts(), 200, 1)?;
        println!("{ta:<6} {:.5}   {:.3}", est.k1.point / 100.0, est.k2.point / est.k1.point);
    }
    Ok(())
}
