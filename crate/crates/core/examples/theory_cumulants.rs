//! Exact kink statistics of the closed-system chain.

use kinkstat::theory::{asymptotic_mean_kinks, kappa3_over_kappa1, kink_cumulants, kink_distribution, QuenchParams};

fn main() -> kinkstat::Result<()> {
    println!("asymptotic k2/k1 = {:.4}, k3/k1 = {:.4}", 2.0 - 2f64.sqrt(), kappa3_over_kappa1());
    println!("tau      <N>        large-tau    k2/k1    k3/k1");
    for tau in [1.0, 10.0, 100.0, 1000.0] {
        let q = QuenchParams::new(2000, tau)?;
        let c = kink_cumulants(&q);
        println!(
            "{tau:<8} {:<10.3} {:<12.3} {:.4}   {:.4}",
            c.k1,
            asymptotic_mean_kinks(&q),
            c.k2 / c.k1,
            c.k3 / c.k1
        );
    }
    let pmf = kink_distribution(&QuenchParams::new(2000, 100.0)?)?;
    let (mode, p) = pmf.iter().fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    println!("tau = 100: most likely kink count {mode} (p = {p:.4})");
    Ok(())
}
