//! Numerically exact per-mode evolution against the Landau-Zener formula.

use kinkstat::model::AnnealSchedule;
use kinkstat::theory::{exact_mode_dynamics, landau_zener, QuenchParams};

fn main() -> kinkstat::Result<()> {
    let q = QuenchParams::new(100, 20.0)?;
    let d = exact_mode_dynamics(&q, &AnnealSchedule::linear_reduced(), 256)?;
    println!("anneal time {:.1}, {} steps, norm drift {:.1e}", d.anneal_time, d.steps, d.max_norm_drift);
    println!("k        exact      Landau-Zener");
    for (k, p) in d.momenta.iter().zip(&d.probabilities).take(8) {
        println!("{k:.4}   {p:.6}   {:.6}", landau_zener(q.tau(), *k));
    }
    Ok(())
}
