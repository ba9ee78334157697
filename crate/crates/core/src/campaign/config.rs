use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::{AnnealSchedule, CouplingKind};
use crate::stats::DEFAULT_RESAMPLES;
use crate::units::{Device, Temperature};
use crate::{Error, Result};

/// What a campaign does at each time point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Generate samples with spin-vector Monte Carlo; the grid holds t′_a.
    Svmc,
    /// Exact closed-system theory; the grid holds the dimensionless τ.
    Theory,
    /// Analyze an existing sample file; the grid optionally restricts the
    /// annealing times used.
    Ingest,
}

/// Campaign description, normally read from TOML:
///
/// ```toml
/// name = "desk-svmc-L200"
/// mode = "svmc"
/// seed = 2024
/// time_grid = [1.0, 2.0, 4.0]
///
/// [instance]
/// length = 200
/// coupling = "antiferro"
///
/// [svmc]
/// schedule = "linear-nasa"
/// temperature_mk = 12.1
/// n0 = 1000
/// samples = 200
///
/// [analysis]
/// bootstrap = 1000
/// fit_range = [1.0, 64.0]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub name: String,
    pub mode: Mode,
    pub seed: u64,
    #[serde(default)]
    pub time_grid: Vec<f64>,
    #[serde(default)]
    pub instance: InstanceSpec,
    pub svmc: Option<SvmcSection>,
    pub ingest: Option<IngestSection>,
    #[serde(default)]
    pub analysis: AnalysisSection,
    /// Where the CLI writes artifacts when no directory is given on the
    /// command line.
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    /// Chain length; ignored in ingest mode, where it comes from the data.
    #[serde(default = "default_length")]
    pub length: usize,
    #[serde(default = "default_coupling")]
    pub coupling: CouplingKind,
    /// Seed for the random gauge when `coupling = "gauge"`.
    #[serde(default)]
    pub gauge_seed: u64,
}

fn default_length() -> usize {
    200
}

fn default_coupling() -> CouplingKind {
    CouplingKind::Antiferro
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec {
            length: default_length(),
            coupling: default_coupling(),
            gauge_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvmcSection {
    /// Built-in schedule name or path to a schedule CSV.
    pub schedule: String,
    /// Physical temperature, for GHz schedules.
    pub temperature_mk: Option<f64>,
    /// k_B T in schedule units, for reduced schedules.
    pub temperature_reduced: Option<f64>,
    #[serde(default = "default_n0")]
    pub n0: u32,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_n0() -> u32 {
    crate::svmc::N0_NASA
}

fn default_samples() -> usize {
    crate::svmc::DEFAULT_SAMPLES
}

impl SvmcSection {
    pub fn temperature(&self) -> Result<Temperature> {
        match (self.temperature_mk, self.temperature_reduced) {
            (Some(mk), None) => Ok(Temperature::millikelvin(mk)),
            (None, Some(t)) => Ok(Temperature::Reduced(t)),
            _ => Err(Error::Config(
                "svmc needs exactly one of temperature_mk and temperature_reduced".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestSection {
    pub path: PathBuf,
    /// Instance file written by `embed`; without it every chain is uniform
    /// with the instance section's coupling.
    pub instances: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    /// Inclusive time range for power-law and ratio fits.
    pub fit_range: Option<[f64; 2]>,
    /// Time whose fitted β′ is held fixed for the trace-norm decay series;
    /// defaults to the last point inside the fit range.
    pub reference_time: Option<f64>,
    /// Device used to express β′ in kelvin: "nasa", "burnaby" or
    /// "custom:B1,T".
    pub device: Option<String>,
    #[serde(default = "default_true")]
    pub boltzmann: bool,
}

fn default_bootstrap() -> usize {
    DEFAULT_RESAMPLES
}

fn default_true() -> bool {
    true
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            bootstrap: default_bootstrap(),
            fit_range: None,
            reference_time: None,
            device: None,
            boltzmann: true,
        }
    }
}

const PRESETS: [(&str, &str); 3] = [
    ("desk-theory", include_str!("../../presets/desk-theory.toml")),
    ("desk-svmc-L200", include_str!("../../presets/desk-svmc-L200.toml")),
    ("desk-boltzmann", include_str!("../../presets/desk-boltzmann.toml")),
];

impl CampaignConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: CampaignConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let (_, text) = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::Config(format!("unknown preset '{name}'; known: {}", preset_names().join(", "))))?;
        Self::from_toml_str(text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let grid = &self.time_grid;
        if self.mode != Mode::Ingest && grid.is_empty() {
            return Err(Error::Config("time_grid is empty".into()));
        }
        if let Some(t) = grid.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::Config(format!("time_grid value {t} must be positive")));
        }
        if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!("time_grid not strictly increasing at {} -> {}", w[0], w[1])));
        }
        if let Some([lo, hi]) = self.analysis.fit_range {
            if !(lo < hi) {
                return Err(Error::Config(format!("fit_range [{lo}, {hi}] is empty")));
            }
        }
        if self.analysis.bootstrap < 100 {
            return Err(Error::Config("analysis.bootstrap must be at least 100".into()));
        }
        if let Some(device) = &self.analysis.device {
            Device::parse(device)?;
        }
        match self.mode {
            Mode::Svmc => {
                let svmc = self.svmc.as_ref().ok_or_else(|| Error::Config("mode svmc needs an [svmc] section".into()))?;
                let schedule = AnnealSchedule::load(&svmc.schedule)?;
                svmc.temperature()?.inverse_in(schedule.unit())?;
                if self.instance.length < 2 {
                    return Err(Error::Config("instance.length must be at least 2".into()));
                }
                if svmc.samples < 10 {
                    return Err(Error::Config("svmc.samples must be at least 10 for cumulant estimates".into()));
                }
                if let Some(t) = grid.iter().find(|t| **t < 1.0) {
                    return Err(Error::Config(format!("t'_a = {t} must be at least 1")));
                }
            }
            Mode::Theory => {
                let l = self.instance.length;
                if l < 4 || !l.is_multiple_of(2) {
                    return Err(Error::Config(format!("theory needs an even length of at least 4, got {l}")));
                }
            }
            Mode::Ingest => {
                let ingest = self
                    .ingest
                    .as_ref()
                    .ok_or_else(|| Error::Config("mode ingest needs an [ingest] section".into()))?;
                for path in std::iter::once(&ingest.path).chain(ingest.instances.as_ref()) {
                    if !path.exists() {
                        return Err(Error::Config(format!("{} does not exist", path.display())));
                    }
                }
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_validate() {
        for name in preset_names() {
            let c = CampaignConfig::preset(name).unwrap();
            assert_eq!(c.name, name);
        }
        assert!(CampaignConfig::preset("nope").is_err());
    }

    #[test]
    fn rejects_bad_grids_and_sections() {
        let base = CampaignConfig::preset("desk-theory").unwrap();
        let mut c = base.clone();
        c.time_grid = vec![1.0, 1.0];
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.time_grid = vec![2.0, 1.0];
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.instance.length = 7;
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.mode = Mode::Ingest;
        assert!(c.validate().is_err());
        let mut c = base;
        c.mode = Mode::Ingest;
        c.ingest = Some(IngestSection { path: "/definitely/missing.csv".into(), instances: None });
        assert!(c.validate().unwrap_err().to_string().contains("does not exist"));
        assert!(CampaignConfig::from_toml_str("name = 'x'\nmode = 'svmc'\nseed = 1\nbogus = 2\n").is_err());
    }

    #[test]
    fn toml_round_trip_and_hash() {
        let c = CampaignConfig::preset("desk-svmc-L200").unwrap();
        let again = CampaignConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.hash(), again.hash());
        let mut other = c.clone();
        other.seed += 1;
        assert_ne!(c.hash(), other.hash());
        assert_eq!(c.hash().len(), 64);
    }
}
