//! One-dimensional minimization: downhill bracketing followed by
//! golden-section search.

use crate::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// A bracket a < b < c with f(b) ≤ min(f(a), f(c)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Walks downhill from `x0` with geometrically growing steps until the
/// function turns up on both sides. Fails after `max_expansions` steps,
/// reporting the last point visited.
pub fn bracket_minimum<F: FnMut(f64) -> f64>(mut f: F, x0: f64, step: f64, max_expansions: usize) -> Result<Bracket> {
    let step = step.abs().max(f64::EPSILON);
    let (fl, f0, fr) = (f(x0 - step), f(x0), f(x0 + step));
    if f0 <= fl && f0 <= fr {
        return Ok(Bracket { a: x0 - step, b: x0, c: x0 + step });
    }
    // Move in the descending direction; on ties prefer the left side.
    let dir = if fl < fr { -1.0 } else { 1.0 };
    let (mut prev, mut cur) = (x0, x0 + dir * step);
    let mut fcur = if dir < 0.0 { fl } else { fr };
    let mut h = step;
    for _ in 0..max_expansions {
        h *= 2.0;
        let next = cur + dir * h;
        let fnext = f(next);
        if !fnext.is_finite() {
            break;
        }
        // A strict rise is required: a plateau (often roundoff on an
        // asymptote) keeps the search going.
        if fnext > fcur {
            let (a, c) = if dir < 0.0 { (next, prev) } else { (prev, next) };
            return Ok(Bracket { a, b: cur, c });
        }
        prev = cur;
        cur = next;
        fcur = fnext;
    }
    Err(Error::Optimizer(format!(
        "bracket expansion exhausted after {max_expansions} steps from x0 = {x0}; last point x = {cur}, f = {fcur}"
    )))
}

/// Golden-section search inside a bracket until the interval is shorter
/// than `tol`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, bracket: Bracket, tol: f64) -> Minimum {
    let (mut lo, mut hi) = (bracket.a, bracket.c);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut evaluations = 2;
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        evaluations += 1;
    }
    let (x, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Minimum { x, value, evaluations }
}

/// Brackets from `x0` and refines to `tol`.
pub fn minimize<F: FnMut(f64) -> f64>(mut f: F, x0: f64, step: f64, tol: f64) -> Result<Minimum> {
    let bracket = bracket_minimum(&mut f, x0, step, 60)?;
    Ok(golden_section(f, bracket, tol))
}
