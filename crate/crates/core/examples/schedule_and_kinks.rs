//! Annealing schedules, kink counting and gauge transforms on a small chain.

use kinkstat::model::{apply_random_gauge, count_kinks, AnnealSchedule, ChainInstance, CouplingKind, SpinConfig};

fn main() -> kinkstat::Result<()> {
    let schedule = AnnealSchedule::preset("linear-nasa")?;
    println!("schedule {} ({:?})", schedule.name(), schedule.unit());
    for s in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let (a, b) = schedule.eval(s)?;
        println!("  s = {s:.2}: A = {a:.3}, B = {b:.3}");
    }
    println!("  critical point s* = {:.4}", schedule.critical_point()?);

    let chain = ChainInstance::uniform("demo", 12, CouplingKind::Antiferro, 0)?;
    let neel = SpinConfig::from_fn(12, |i| i % 2 == 0);
    let broken = SpinConfig::from_signs(&[1, -1, 1, -1, -1, 1, -1, 1, 1, -1, 1, -1])?;
    println!("Neel state: {} kinks; {}: {} kinks", count_kinks(&chain, &neel)?, broken, count_kinks(&chain, &broken)?);

    // A gauge flip of couplings and spins leaves the kink count alone.
    let (gauged, mask) = apply_random_gauge(&chain, 7);
    let flipped = broken.flipped(&mask)?;
    println!("gauged couplings {:?}", gauged.couplings());
    println!("after gauge: {} kinks", count_kinks(&gauged, &flipped)?);
    Ok(())
}
