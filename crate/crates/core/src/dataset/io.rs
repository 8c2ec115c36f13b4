use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::events::{EventVector, DEFAULT_FREQUENCY_HZ};
use super::{ComponentMap, Dataset, DesignConfiguration, Sample, TechnologyNode};
use crate::error::{PandaError, Result};

pub const SCHEMA_VERSION: &str = "panda-ds-1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    schema_version: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    config: DesignConfiguration,
    tech: TechnologyNode,
    workload: String,
    events: BTreeMap<String, u64>,
    baseline_cycles: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frequency_hz: Option<f64>,
    labels: Labels,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Labels {
    total_power_w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    component_power_w: Option<ComponentMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cycles: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    component_area_um2: Option<ComponentMap>,
}

impl From<&Sample> for Record {
    fn from(s: &Sample) -> Self {
        Record {
            config: s.config.clone(),
            tech: s.tech.clone(),
            workload: s.events.workload.clone(),
            events: s.events.counts.clone(),
            baseline_cycles: s.events.baseline_cycles,
            frequency_hz: (s.events.frequency_hz != DEFAULT_FREQUENCY_HZ).then_some(s.events.frequency_hz),
            labels: Labels {
                total_power_w: s.total_power,
                component_power_w: s.component_power.clone(),
                cycles: s.true_cycles,
                component_area_um2: s.component_area.clone(),
            },
        }
    }
}

fn record_to_sample(r: Record, line: usize) -> Result<Sample> {
    let events = EventVector::new(
        r.workload,
        r.events,
        r.baseline_cycles,
        r.frequency_hz.unwrap_or(DEFAULT_FREQUENCY_HZ),
    )
    .map_err(|e| PandaError::Parse {
        line,
        message: e.to_string(),
    })?;
    Ok(Sample {
        config: r.config,
        tech: r.tech,
        events,
        total_power: r.labels.total_power_w,
        component_power: r.labels.component_power_w,
        true_cycles: r.labels.cycles,
        component_area: r.labels.component_area_um2,
    })
}

/// Parses JSON-lines dataset text. An optional first line may carry the
/// schema header.
pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut samples = Vec::new();
    let mut version = SCHEMA_VERSION.to_string();
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if first {
            first = false;
            if let Ok(h) = serde_json::from_str::<Header>(trimmed) {
                if h.schema_version != SCHEMA_VERSION {
                    return Err(PandaError::VersionMismatch {
                        expected: SCHEMA_VERSION.into(),
                        found: h.schema_version,
                    });
                }
                version = h.schema_version;
                continue;
            }
        }
        let record: Record = serde_json::from_str(trimmed).map_err(|e| PandaError::Parse {
            line,
            message: e.to_string(),
        })?;
        samples.push(record_to_sample(record, line)?);
    }
    let ds = Dataset {
        samples,
        schema_version: version,
    };
    ds.validate()?;
    Ok(ds)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| PandaError::io(path, e))?;
    parse_dataset(&text)
}

impl Dataset {
    /// Serializes to JSON-lines text with a leading schema header.
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&Header {
            schema_version: self.schema_version.clone(),
        })
        .expect("header serializes");
        out.push('\n');
        for s in &self.samples {
            out.push_str(&serde_json::to_string(&Record::from(s)).expect("record serializes"));
            out.push('\n');
        }
        out
    }
}

pub fn write_dataset(path: impl AsRef<Path>, ds: &Dataset) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, ds.to_jsonl()).map_err(|e| PandaError::io(path, e))
}
