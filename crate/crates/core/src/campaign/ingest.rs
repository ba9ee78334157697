use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;
use std::sync::Arc;

use crate::embedding::{records_to_instances, InstanceRecord};
use crate::model::{read_samples_csv, ChainInstance, CouplingKind, ParsedSample, SampleSet, SampleSource};
use crate::{Error, Result};

/// Where ingested rows get their couplings from.
#[derive(Debug, Clone)]
pub enum InstanceSource {
    /// Every chain is uniform with this coupling and the length of its rows.
    Uniform(CouplingKind),
    /// Instances looked up by id.
    Known(Vec<Arc<ChainInstance>>),
}

impl InstanceSource {
    /// Reads instance records written by the `embed` subcommand.
    pub fn from_records_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
        let records: Vec<InstanceRecord> = serde_json::from_reader(BufReader::new(file))?;
        Ok(InstanceSource::Known(records_to_instances(&records)?))
    }
}

/// Reads a sample CSV file and groups its rows by (instance_id,
/// anneal_time). Groups come back sorted by instance id, then time.
pub fn ingest_samples(path: impl AsRef<Path>, source: &InstanceSource) -> Result<Vec<SampleSet>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
    ingest_reader(&path.display().to_string(), BufReader::new(file), source)
}

pub fn ingest_reader<R: Read>(source_name: &str, reader: R, source: &InstanceSource) -> Result<Vec<SampleSet>> {
    let rows = read_samples_csv(source_name, reader)?;
    group_samples(source_name, rows, source)
}

fn group_samples(source_name: &str, rows: Vec<ParsedSample>, source: &InstanceSource) -> Result<Vec<SampleSet>> {
    // f64 keys are grouped by bit pattern; parsing is deterministic so equal
    // text gives equal bits.
    let mut groups: BTreeMap<(String, u64), Vec<ParsedSample>> = BTreeMap::new();
    for row in rows {
        groups.entry((row.instance_id.clone(), row.anneal_time.to_bits())).or_default().push(row);
    }
    let mut sets: Vec<SampleSet> = Vec::with_capacity(groups.len());
    let mut uniform: BTreeMap<(String, usize), Arc<ChainInstance>> = BTreeMap::new();
    for ((id, bits), rows) in groups {
        let len = rows[0].config.len();
        if let Some(bad) = rows.iter().find(|r| r.config.len() != len) {
            return Err(Error::invalid(
                "sample group",
                format!(
                    "{source_name} line {}: instance '{id}' has {} spins here but {len} on line {}",
                    bad.line,
                    bad.config.len(),
                    rows[0].line
                ),
            ));
        }
        let instance = match source {
            InstanceSource::Uniform(kind) => match uniform.get(&(id.clone(), len)) {
                Some(inst) => inst.clone(),
                None => {
                    let inst = Arc::new(ChainInstance::uniform(id.clone(), len, *kind, 0)?);
                    uniform.insert((id.clone(), len), inst.clone());
                    inst
                }
            },
            InstanceSource::Known(list) => list
                .iter()
                .find(|i| i.id() == id)
                .cloned()
                .ok_or_else(|| {
                    Error::invalid("sample group", format!("{source_name} line {}: unknown instance '{id}'", rows[0].line))
                })?,
        };
        if instance.len() != len {
            return Err(Error::invalid(
                "sample group",
                format!(
                    "{source_name} line {}: {len} spins for instance '{id}' of length {}",
                    rows[0].line,
                    instance.len()
                ),
            ));
        }
        let configs = rows.into_iter().map(|r| r.config).collect();
        sets.push(SampleSet::new(instance, f64::from_bits(bits), configs, SampleSource::Ingested)?);
    }
    Ok(sets)
}
