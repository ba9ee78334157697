//! Effective temperature of a kink histogram from the Boltzmann model.

use kinkstat::boltzmann::{beta_from_density, fit_beta, BoltzmannModel};
use kinkstat::units::Device;

fn main() -> kinkstat::Result<()> {
    let length = 200;
    let truth = BoltzmannModel::new(length, 2.0)?;
    println!("beta' = 2: density {:.5}", truth.density());
    let fit = fit_beta(&truth.pmf(), length)?;
    println!("fit: beta_kl = {:.6}, beta_tn = {:.6}", fit.beta_kl, fit.beta_tn);
    println!("from density alone: {:.6}", beta_from_density(length, truth.density())?);
    let t = truth.effective_temperature(&Device::nasa());
    println!("{t:?}");
    Ok(())
}
