//! Power-law, constant and decay-shape fits on synthetic data.

use kinkstat::stats::{fit_constant, fit_decay_shape, fit_power_law, FitPoint, Weighting};

fn main() -> kinkstat::Result<()> {
    let pts: Vec<FitPoint> = (0..10)
        .map(|i| {
            let t = 2f64.powi(i);
            FitPoint::new(t, 0.03 * t.powf(-0.55) * (1.0 + 0.02 * (i as f64).sin()))
        })
        .collect();
    let fit = fit_power_law(&pts, Some((2.0, 256.0)), Weighting::Unweighted)?;
    println!("alpha = {:.4} ± {:.4} over {} points", fit.value("alpha"), fit.stderr("alpha"), fit.n_points);

    let ratios = [(10.0, 0.58, 0.01), (20.0, 0.60, 0.01), (40.0, 0.59, 0.02)];
    let c = fit_constant(&ratios)?;
    println!("constant = {:.4} ± {:.4}", c.value("constant"), c.stderr("constant"));

    let decay: Vec<(f64, f64)> = (1..12).map(|i| (10.0 * i as f64, 0.5 * (-0.03 * 10.0 * i as f64).exp())).collect();
    println!("decay shape: {:?}", fit_decay_shape(&decay)?.preferred);
    Ok(())
}
