use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const NASA_APPROX_CSV: &str = include_str!("../../data/schedules/nasa_approx.csv");
const BURNABY_APPROX_CSV: &str = include_str!("../../data/schedules/burnaby_approx.csv");

/// Energy unit carried by the tabulated A and B columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyUnit {
    /// E/h in GHz, as plotted for hardware schedules.
    GigaHertz,
    /// Dimensionless energies (an arbitrary but fixed energy unit).
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulePoint {
    pub s: f64,
    #[serde(rename = "A_GHz")]
    pub a: f64,
    #[serde(rename = "B_GHz")]
    pub b: f64,
}

/// Tabulated annealing schedule A(s), B(s) on s ∈ [0, 1].
///
/// The stored values are the full A and B curves; the chain Hamiltonian uses
/// A/2 and B/2, which [`AnnealSchedule::half`] returns. Evaluation between
/// knots is piecewise linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    name: String,
    unit: EnergyUnit,
    points: Vec<SchedulePoint>,
}

impl AnnealSchedule {
    pub fn new(name: impl Into<String>, unit: EnergyUnit, points: Vec<SchedulePoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("schedule", "need at least two points"));
        }
        if points.iter().any(|p| !(p.s.is_finite() && p.a.is_finite() && p.b.is_finite())) {
            return Err(Error::invalid("schedule", "non-finite value"));
        }
        if points[0].s != 0.0 || points[points.len() - 1].s != 1.0 {
            return Err(Error::invalid("schedule", "s must start at 0 and end at 1"));
        }
        for w in points.windows(2) {
            if w[1].s <= w[0].s {
                return Err(Error::invalid(
                    "schedule",
                    format!("s not strictly increasing at s = {}", w[1].s),
                ));
            }
            if w[1].b < w[0].b {
                return Err(Error::invalid(
                    "schedule",
                    format!("B decreases between s = {} and s = {}", w[0].s, w[1].s),
                ));
            }
        }
        let a_max = points.iter().map(|p| p.a.abs()).fold(0.0, f64::max);
        let a_end = points[points.len() - 1].a;
        if a_end.abs() > 1e-6 * a_max {
            return Err(Error::invalid("schedule", format!("A(1) = {a_end} is not zero")));
        }
        Ok(AnnealSchedule {
            name: name.into(),
            unit,
            points,
        })
    }

    /// Linear schedule A(s)/2 = scale·(1 − s), B(s)/2 = scale·s.
    pub fn linear(scale: f64, unit: EnergyUnit) -> Self {
        let points = vec![
            SchedulePoint { s: 0.0, a: 2.0 * scale, b: 0.0 },
            SchedulePoint { s: 1.0, a: 0.0, b: 2.0 * scale },
        ];
        AnnealSchedule {
            name: format!("linear({scale})"),
            unit,
            points,
        }
    }

    /// Dimensionless linear schedule with B(1)/2 = 1.
    pub fn linear_reduced() -> Self {
        Self::linear(1.0, EnergyUnit::Reduced)
    }

    /// Named built-in schedules.
    ///
    /// - `linear`: dimensionless linear schedule.
    /// - `linear-nasa`, `linear-burnaby`: linear schedule whose energy unit is
    ///   the device's B(1)/2 in GHz.
    /// - `nasa-approx`, `burnaby-approx`: approximate hardware-shaped curves
    ///   shipped under `data/schedules/` (not vendor data).
    pub fn preset(name: &str) -> Result<Self> {
        let schedule = match name {
            "linear" => Self::linear_reduced(),
            "linear-nasa" => Self::linear(6.344, EnergyUnit::GigaHertz),
            "linear-burnaby" => Self::linear(5.930, EnergyUnit::GigaHertz),
            "nasa-approx" => Self::from_csv_reader("nasa-approx", NASA_APPROX_CSV.as_bytes())?,
            "burnaby-approx" => Self::from_csv_reader("burnaby-approx", BURNABY_APPROX_CSV.as_bytes())?,
            other => return Err(Error::invalid("schedule", format!("unknown preset '{other}'"))),
        };
        Ok(schedule.named(name))
    }

    /// Loads a preset name or, failing that, a CSV file path.
    pub fn load(spec: &str) -> Result<Self> {
        match Self::preset(spec) {
            Ok(s) => Ok(s),
            Err(_) if Path::new(spec).exists() => Self::from_csv_path(spec),
            Err(e) => Err(e),
        }
    }

    fn named(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Reads the `s,A_GHz,B_GHz` CSV format. Lines starting with `#` are comments.
    pub fn from_csv_reader<R: Read>(name: &str, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["s", "A_GHz", "B_GHz"] {
            return Err(Error::Parse {
                source_name: name.to_string(),
                line: 1,
                reason: format!("expected header s,A_GHz,B_GHz, got {}", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut points = Vec::new();
        for row in rdr.deserialize::<SchedulePoint>() {
            let point = row.map_err(|e| Error::Parse {
                source_name: name.to_string(),
                line: e.position().map(|p| p.line() as usize).unwrap_or(0),
                reason: e.to_string(),
            })?;
            points.push(point);
        }
        Self::new(name, EnergyUnit::GigaHertz, points)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(&path.display().to_string(), file)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        for p in &self.points {
            wtr.serialize(p)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> EnergyUnit {
        self.unit
    }

    pub fn points(&self) -> &[SchedulePoint] {
        &self.points
    }

    /// Interpolated (A(s), B(s)); exact at knots.
    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::domain(format!("schedule evaluated at s = {s} outside [0, 1]")));
        }
        let pts = &self.points;
        // index of the first knot with knot.s > s
        let hi = pts.partition_point(|p| p.s <= s);
        if hi == 0 {
            return Ok((pts[0].a, pts[0].b));
        }
        if hi == pts.len() {
            let last = pts[pts.len() - 1];
            return Ok((last.a, last.b));
        }
        let (p0, p1) = (pts[hi - 1], pts[hi]);
        if s == p0.s {
            return Ok((p0.a, p0.b));
        }
        let w = (s - p0.s) / (p1.s - p0.s);
        Ok((p0.a + w * (p1.a - p0.a), p0.b + w * (p1.b - p0.b)))
    }

    /// (A(s)/2, B(s)/2), the coefficients entering the Hamiltonian.
    pub fn half(&self, s: f64) -> Result<(f64, f64)> {
        let (a, b) = self.eval(s)?;
        Ok((0.5 * a, 0.5 * b))
    }

    /// B(1)/2.
    pub fn final_ising_half(&self) -> f64 {
        0.5 * self.points[self.points.len() - 1].b
    }

    /// Location of the crossing A(s) = B(s), found by bisection on the
    /// interpolated curves.
    pub fn critical_point(&self) -> Result<f64> {
        let f = |s: f64| -> f64 {
            let (a, b) = self.eval(s).expect("s within [0, 1]");
            a - b
        };
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        if f(lo) <= 0.0 || f(hi) >= 0.0 {
            return Err(Error::domain(format!(
                "schedule '{}' has no crossing A(s) = B(s) in (0, 1)",
                self.name
            )));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
