use crate::theory::KinkDistribution;
use crate::{Error, Result};

/// Normalized histogram over the observed range of counts.
pub fn histogram(counts: &[usize]) -> Result<KinkDistribution> {
    let (Some(&lo), Some(&hi)) = (counts.iter().min(), counts.iter().max()) else {
        return Err(Error::invalid("histogram", "no counts"));
    };
    let mut bins = vec![0u64; hi - lo + 1];
    for &c in counts {
        bins[c - lo] += 1;
    }
    let n = counts.len() as f64;
    KinkDistribution::new(lo, bins.into_iter().map(|b| b as f64 / n).collect())
}

/// Trace-norm distance ½ Σ |P(n) − Q(n)|.
pub fn tv_distance(p: &KinkDistribution, q: &KinkDistribution) -> f64 {
    let (_, a, b) = p.aligned(q);
    0.5 * a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// D_KL(P ‖ Q) = Σ P log(P/Q) in nats, with 0·log 0 = 0.
pub fn kl_divergence(p: &KinkDistribution, q: &KinkDistribution) -> Result<f64> {
    let mut total = 0.0;
    for (n, pn) in p.iter() {
        if pn == 0.0 {
            continue;
        }
        let qn = q.prob(n);
        if qn == 0.0 {
            return Err(Error::domain(format!("KL divergence undefined: Q({n}) = 0 where P({n}) = {pn}")));
        }
        total += pn * (pn / qn).ln();
    }
    Ok(total.max(0.0))
}
