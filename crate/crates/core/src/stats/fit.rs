use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    /// ln y = intercept − alpha·ln t
    PowerLaw,
    /// ln y = intercept − gamma·t
    Exponential,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitParam {
    pub name: String,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub kind: FitKind,
    pub params: Vec<FitParam>,
    /// Smallest and largest t among the points used.
    pub range: (f64, f64),
    pub n_points: usize,
    /// Residual sum of squares in the fitted (transformed) space; for
    /// constant fits, χ² of the weighted residuals.
    pub residual: f64,
}

impl FitResult {
    pub fn param(&self, name: &str) -> Option<&FitParam> {
        self.params.iter().find(|p| p.name == name)
    }

    /// Value of a parameter this fit kind always carries.
    pub fn value(&self, name: &str) -> f64 {
        self.param(name).unwrap_or_else(|| panic!("fit has no parameter '{name}'")).value
    }

    pub fn stderr(&self, name: &str) -> f64 {
        self.param(name).unwrap_or_else(|| panic!("fit has no parameter '{name}'")).stderr
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub t: f64,
    pub y: f64,
    /// Relative weight in the weighted variant, typically 1/σ² of ln y.
    pub weight: Option<f64>,
}

impl FitPoint {
    pub fn new(t: f64, y: f64) -> Self {
        FitPoint { t, y, weight: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    Unweighted,
    Weighted,
}

struct Line {
    slope: f64,
    intercept: f64,
    slope_se: f64,
    intercept_se: f64,
    rss: f64,
}

/// Weighted least squares y = a + b x with the usual variance estimate
/// s² = Σ w r² / (n − 2).
fn regress(xs: &[f64], ys: &[f64], ws: &[f64]) -> Line {
    let sw: f64 = ws.iter().sum();
    let xbar = xs.iter().zip(ws).map(|(x, w)| w * x).sum::<f64>() / sw;
    let ybar = ys.iter().zip(ws).map(|(y, w)| w * y).sum::<f64>() / sw;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for ((x, y), w) in xs.iter().zip(ys).zip(ws) {
        sxx += w * (x - xbar) * (x - xbar);
        sxy += w * (x - xbar) * (y - ybar);
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .zip(ws)
        .map(|((x, y), w)| w * (y - intercept - slope * x).powi(2))
        .sum();
    let dof = xs.len() as f64 - 2.0;
    let s2 = if dof > 0.0 { rss / dof } else { 0.0 };
    Line {
        slope,
        intercept,
        slope_se: (s2 / sxx).sqrt(),
        intercept_se: (s2 * (1.0 / sw + xbar * xbar / sxx)).sqrt(),
        rss,
    }
}

fn select(points: &[FitPoint], range: Option<(f64, f64)>) -> Vec<FitPoint> {
    points
        .iter()
        .filter(|p| range.is_none_or(|(lo, hi)| p.t >= lo && p.t <= hi))
        .copied()
        .collect()
}

fn span(points: &[FitPoint]) -> Result<(f64, f64)> {
    let lo = points.iter().map(|p| p.t).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.t).fold(f64::NEG_INFINITY, f64::max);
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(Error::invalid("fit", "points span a single time value"))
    }
}

fn weights(points: &[FitPoint], weighting: Weighting) -> Result<Vec<f64>> {
    match weighting {
        Weighting::Unweighted => Ok(vec![1.0; points.len()]),
        Weighting::Weighted => points
            .iter()
            .map(|p| match p.weight {
                Some(w) if w.is_finite() && w > 0.0 => Ok(w),
                other => Err(Error::invalid("fit", format!("point at t = {} has weight {other:?}", p.t))),
            })
            .collect(),
    }
}

/// Least-squares power law y = e^c · t^(−alpha) over the points whose t lies
/// in `range` (inclusive), fitted as a line in (ln t, ln y).
pub fn fit_power_law(points: &[FitPoint], range: Option<(f64, f64)>, weighting: Weighting) -> Result<FitResult> {
    let used = select(points, range);
    if used.len() < 3 {
        return Err(Error::invalid(
            "power-law fit",
            format!("{} points in range, at least 3 required", used.len()),
        ));
    }
    if let Some(p) = used.iter().find(|p| !(p.t > 0.0 && p.y > 0.0)) {
        return Err(Error::domain(format!("power-law fit needs t, y > 0, got ({}, {})", p.t, p.y)));
    }
    let range = span(&used)?;
    let ws = weights(&used, weighting)?;
    let xs: Vec<f64> = used.iter().map(|p| p.t.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|p| p.y.ln()).collect();
    let line = regress(&xs, &ys, &ws);
    Ok(FitResult {
        kind: FitKind::PowerLaw,
        params: vec![
            FitParam { name: "alpha".into(), value: -line.slope, stderr: line.slope_se },
            FitParam { name: "intercept".into(), value: line.intercept, stderr: line.intercept_se },
        ],
        range,
        n_points: used.len(),
        residual: line.rss,
    })
}

/// Inverse-variance weighted mean of `(t, r, sigma)` points. Points with
/// σ = 0 are exact and override the rest; they must then agree.
pub fn fit_constant(points: &[(f64, f64, f64)]) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::invalid("constant fit", "at least 2 points required"));
    }
    if let Some(p) = points.iter().find(|p| !(p.1.is_finite() && p.2.is_finite() && p.2 >= 0.0)) {
        return Err(Error::invalid("constant fit", format!("bad point (t = {}, r = {}, sigma = {})", p.0, p.1, p.2)));
    }
    let t_lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let t_hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let exact: Vec<f64> = points.iter().filter(|p| p.2 == 0.0).map(|p| p.1).collect();
    let (value, stderr, residual) = if let Some(&first) = exact.first() {
        if exact.iter().any(|&r| r != first) {
            return Err(Error::invalid("constant fit", "points with zero sigma disagree"));
        }
        (first, 0.0, 0.0)
    } else {
        let sw: f64 = points.iter().map(|p| 1.0 / (p.2 * p.2)).sum();
        let mean = points.iter().map(|p| p.1 / (p.2 * p.2)).sum::<f64>() / sw;
        let chi2 = points.iter().map(|p| ((p.1 - mean) / p.2).powi(2)).sum();
        (mean, 1.0 / sw.sqrt(), chi2)
    };
    Ok(FitResult {
        kind: FitKind::Constant,
        params: vec![FitParam { name: "constant".into(), value, stderr }],
        range: (t_lo, t_hi),
        n_points: points.len(),
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayShape {
    PowerLaw,
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub power: FitResult,
    pub exponential: FitResult,
    pub preferred: DecayShape,
}

/// Fits D ∝ t^(−alpha) in log-log space and D ∝ e^(−gamma t) in semilog
/// space; the shape with the smaller residual sum of squares is preferred.
pub fn fit_decay_shape(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.len() < 4 {
        return Err(Error::invalid("decay fit", format!("{} points, at least 4 required", points.len())));
    }
    if let Some(p) = points.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::domain(format!("decay fit needs D > 0, got D = {} at t = {}", p.1, p.0)));
    }
    let fit_points: Vec<FitPoint> = points.iter().map(|&(t, d)| FitPoint::new(t, d)).collect();
    let power = fit_power_law(&fit_points, None, Weighting::Unweighted)?;
    let range = span(&fit_points)?;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let line = regress(&xs, &ys, &vec![1.0; xs.len()]);
    let exponential = FitResult {
        kind: FitKind::Exponential,
        params: vec![
            FitParam { name: "gamma".into(), value: -line.slope, stderr: line.slope_se },
            FitParam { name: "intercept".into(), value: line.intercept, stderr: line.intercept_se },
        ],
        range,
        n_points: points.len(),
        residual: line.rss,
    };
    let preferred = if power.residual <= exponential.residual {
        DecayShape::PowerLaw
    } else {
        DecayShape::Exponential
    };
    Ok(DecayFit { power, exponential, preferred })
}
