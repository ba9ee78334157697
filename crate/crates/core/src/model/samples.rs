use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::chain::{count_kinks_unchecked, ChainInstance, SpinConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSource {
    Ingested,
    Svmc,
    ExactOracle,
}

/// Final configurations from repeated anneals of one instance at one
/// annealing time. For ingested data `anneal_time` is in µs, for SVMC it is
/// the dimensionless t′_a.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    instance: Arc<ChainInstance>,
    anneal_time: f64,
    configs: Vec<SpinConfig>,
    source: SampleSource,
}

impl SampleSet {
    pub fn new(
        instance: Arc<ChainInstance>,
        anneal_time: f64,
        configs: Vec<SpinConfig>,
        source: SampleSource,
    ) -> Result<Self> {
        if configs.is_empty() {
            return Err(Error::invalid("sample set", "no configurations"));
        }
        if let Some(bad) = configs.iter().position(|c| c.len() != instance.len()) {
            return Err(Error::invalid(
                "sample set",
                format!(
                    "configuration {bad} has {} spins, instance '{}' has {}",
                    configs[bad].len(),
                    instance.id(),
                    instance.len()
                ),
            ));
        }
        Ok(SampleSet {
            instance,
            anneal_time,
            configs,
            source,
        })
    }

    pub fn instance(&self) -> &Arc<ChainInstance> {
        &self.instance
    }

    pub fn anneal_time(&self) -> f64 {
        self.anneal_time
    }

    pub fn configs(&self) -> &[SpinConfig] {
        &self.configs
    }

    pub fn source(&self) -> SampleSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn kink_counts(&self) -> Vec<usize> {
        let js = self.instance.couplings();
        self.configs.iter().map(|c| count_kinks_unchecked(js, c)).collect()
    }
}

/// One row of the sample CSV, `instance_id,anneal_time,spins`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub instance_id: String,
    pub anneal_time: f64,
    pub spins: String,
}

/// A parsed row together with its 1-based line number in the source file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSample {
    pub line: usize,
    pub instance_id: String,
    pub anneal_time: f64,
    pub config: SpinConfig,
}

pub fn write_samples_csv<W: Write>(writer: W, sets: &[SampleSet]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["instance_id", "anneal_time", "spins"])?;
    for set in sets {
        let time = set.anneal_time.to_string();
        for cfg in &set.configs {
            wtr.write_record([set.instance.id(), time.as_str(), cfg.to_string().as_str()])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Reads and validates every row of a sample CSV, reporting the first
/// malformed row by line number.
pub fn read_samples_csv<R: Read>(source_name: &str, reader: R) -> Result<Vec<ParsedSample>> {
    let parse_err = |line: usize, reason: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        reason,
    };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["instance_id", "anneal_time", "spins"] {
        return Err(parse_err(
            1,
            format!(
                "expected header instance_id,anneal_time,spins, got {}",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let anneal_time: f64 = record[1]
            .parse()
            .map_err(|_| parse_err(line, format!("anneal_time '{}' is not a number", &record[1])))?;
        if !(anneal_time.is_finite() && anneal_time > 0.0) {
            return Err(parse_err(line, format!("anneal_time {anneal_time} must be positive")));
        }
        let config: SpinConfig = record[2].parse().map_err(|e: Error| parse_err(line, e.to_string()))?;
        rows.push(ParsedSample {
            line,
            instance_id: record[0].to_string(),
            anneal_time,
            config,
        });
    }
    if rows.is_empty() {
        return Err(parse_err(1, "no data rows".into()));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CouplingKind;

    #[test]
    fn sample_set_invariants() {
        let inst = Arc::new(ChainInstance::uniform("a", 4, CouplingKind::Antiferro, 0).unwrap());
        assert!(SampleSet::new(inst.clone(), 1.0, vec![], SampleSource::Svmc).is_err());
        assert!(SampleSet::new(inst.clone(), 1.0, vec![SpinConfig::all_up(3)], SampleSource::Svmc).is_err());
        let set = SampleSet::new(inst, 1.0, vec![SpinConfig::all_up(4)], SampleSource::Svmc).unwrap();
        assert_eq!(set.kink_counts(), vec![3]);
    }

    #[test]
    fn csv_write_then_read() {
        let inst = Arc::new(ChainInstance::uniform("chain-0", 5, CouplingKind::Antiferro, 0).unwrap());
        let set = SampleSet::new(
            inst,
            2.5,
            vec!["+-+-+".parse().unwrap(), "++---".parse().unwrap()],
            SampleSource::Svmc,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &[set]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("instance_id,anneal_time,spins\n"));
        let rows = read_samples_csv("mem", buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].line, 3);
        assert_eq!(rows[1].config.to_string(), "++---");
        assert_eq!(rows[0].anneal_time, 2.5);
    }

    #[test]
    fn bad_rows_name_their_line() {
        let text = "instance_id,anneal_time,spins\na,1,+-+\na,1,+?+\n";
        let err = read_samples_csv("f.csv", text.as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
        let empty = "instance_id,anneal_time,spins\n";
        assert!(read_samples_csv("e", empty.as_bytes()).unwrap_err().to_string().contains("no data rows"));
        assert!(read_samples_csv("e", "".as_bytes()).is_err());
    }
}
