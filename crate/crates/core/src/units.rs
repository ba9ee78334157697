//! Physical constants and the single place where energies and temperatures
//! change units.

use serde::{Deserialize, Serialize};

use crate::model::EnergyUnit;
use crate::{Error, Result};

/// h / k_B expressed in kelvin per gigahertz.
pub const KELVIN_PER_GHZ: f64 = 6.626_070_15e-34 / 1.380_649e-23 * 1e9;

/// Simulation or device temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "unit", content = "value", rename_all = "snake_case")]
pub enum Temperature {
    Kelvin(f64),
    /// k_B T in the energy unit of a schedule built with [`EnergyUnit::Reduced`].
    Reduced(f64),
}

impl Temperature {
    pub fn millikelvin(mk: f64) -> Self {
        Temperature::Kelvin(mk * 1e-3)
    }

    /// Inverse temperature in units of inverse schedule energy.
    ///
    /// Kelvin temperatures pair only with GHz schedules, reduced temperatures
    /// only with reduced schedules.
    pub fn inverse_in(&self, unit: EnergyUnit) -> Result<f64> {
        let (value, beta) = match (*self, unit) {
            (Temperature::Kelvin(t), EnergyUnit::GigaHertz) => (t, KELVIN_PER_GHZ / t),
            (Temperature::Reduced(t), EnergyUnit::Reduced) => (t, 1.0 / t),
            (t, u) => {
                return Err(Error::Config(format!(
                    "temperature {t:?} cannot be combined with a schedule in {u:?} units"
                )))
            }
        };
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Config(format!("temperature must be positive, got {value}")));
        }
        Ok(beta)
    }
}

/// Device constants used to convert a dimensionless inverse temperature β′
/// into kelvin, β′ = (B(1)/2) / (k_B T).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Device {
    pub name: String,
    /// B(1)/2 in GHz.
    pub b1_half_ghz: f64,
    /// Physical operating temperature in kelvin.
    pub temperature_k: f64,
}

impl Device {
    pub fn nasa() -> Self {
        Device {
            name: "nasa".into(),
            b1_half_ghz: 6.344,
            temperature_k: 12.1e-3,
        }
    }

    pub fn burnaby() -> Self {
        Device {
            name: "burnaby".into(),
            b1_half_ghz: 5.930,
            temperature_k: 13.5e-3,
        }
    }

    /// Parses `nasa`, `burnaby` or `custom:B1HALF_GHZ,T_KELVIN`.
    pub fn parse(spec: &str) -> Result<Self> {
        match spec {
            "nasa" => Ok(Self::nasa()),
            "burnaby" => Ok(Self::burnaby()),
            other => {
                let body = other
                    .strip_prefix("custom:")
                    .ok_or_else(|| Error::invalid("device", format!("unknown device '{other}'")))?;
                let mut parts = body.split(',');
                let parse = |p: Option<&str>| -> Result<f64> {
                    p.and_then(|v| v.trim().parse::<f64>().ok())
                        .filter(|v| v.is_finite() && *v > 0.0)
                        .ok_or_else(|| Error::invalid("device", format!("expected custom:B1,T, got '{other}'")))
                };
                let b1 = parse(parts.next())?;
                let t = parse(parts.next())?;
                if parts.next().is_some() {
                    return Err(Error::invalid("device", format!("expected custom:B1,T, got '{other}'")));
                }
                Ok(Device {
                    name: "custom".into(),
                    b1_half_ghz: b1,
                    temperature_k: t,
                })
            }
        }
    }

    /// β′ implied by the physical temperature alone.
    pub fn physical_beta(&self) -> f64 {
        self.b1_half_ghz * KELVIN_PER_GHZ / self.temperature_k
    }

    /// Effective temperature in kelvin for a fitted β′.
    pub fn effective_temperature_k(&self, beta_prime: f64) -> f64 {
        self.b1_half_ghz * KELVIN_PER_GHZ / beta_prime
    }
}
