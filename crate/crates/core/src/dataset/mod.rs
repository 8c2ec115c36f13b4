//! Data model: design points, workload events, labeled samples, on-disk
//! format and train/test split protocols.

mod component;
mod config;
pub mod events;
mod io;
mod split;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use component::{ComponentId, CpuPart};
pub use config::{builtin, builtin_configurations, normal_configurations, ConfigParam, DesignConfiguration};
pub use events::{EventVector, DEFAULT_FREQUENCY_HZ};
pub use io::{load_dataset, parse_dataset, write_dataset, SCHEMA_VERSION};
pub use split::{split_known_n, split_unknown_domain, Fold, SplitPlan};

use crate::error::{PandaError, Result};

/// Per-component values (power in watts or area in square micrometers).
pub type ComponentMap = BTreeMap<ComponentId, f64>;

/// A process technology corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TechnologyNode {
    pub name: String,
    #[serde(rename = "feature_size_nm")]
    pub feature_size: f64,
    #[serde(rename = "voltage_v")]
    pub voltage: f64,
}

impl TechnologyNode {
    pub fn new(name: impl Into<String>, feature_size: f64, voltage: f64) -> Result<Self> {
        let node = TechnologyNode {
            name: name.into(),
            feature_size,
            voltage,
        };
        node.validate()?;
        Ok(node)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.feature_size.is_finite() && self.feature_size > 0.0) {
            return Err(PandaError::InvalidArgument(format!(
                "node {}: feature size must be positive",
                self.name
            )));
        }
        if !(self.voltage.is_finite() && self.voltage > 0.0) {
            return Err(PandaError::InvalidArgument(format!(
                "node {}: voltage must be positive",
                self.name
            )));
        }
        Ok(())
    }

    pub fn tsmc28() -> Self {
        TechnologyNode {
            name: "tsmc28".into(),
            feature_size: 28.0,
            voltage: 0.8,
        }
    }

    pub fn tsmc40() -> Self {
        TechnologyNode {
            name: "tsmc40".into(),
            feature_size: 40.0,
            voltage: 1.1,
        }
    }

    pub fn tsmc65() -> Self {
        TechnologyNode {
            name: "tsmc65".into(),
            feature_size: 65.0,
            voltage: 1.2,
        }
    }
}

/// One labeled (design, workload, technology) record.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub config: DesignConfiguration,
    pub tech: TechnologyNode,
    pub events: EventVector,
    pub total_power: f64,
    pub component_power: Option<ComponentMap>,
    pub true_cycles: Option<u64>,
    pub component_area: Option<ComponentMap>,
}

impl Sample {
    /// Stable label used in error messages.
    pub fn key(&self) -> String {
        format!("{}/{}", self.config.id, self.events.workload)
    }

    pub fn workload(&self) -> &str {
        &self.events.workload
    }

    pub fn validate(&self) -> Result<()> {
        let invariant = |message: String| PandaError::Invariant {
            sample: self.key(),
            message,
        };
        self.config.validate().map_err(|e| invariant(e.to_string()))?;
        self.tech.validate().map_err(|e| invariant(e.to_string()))?;
        self.events.validate().map_err(|e| invariant(e.to_string()))?;
        if !(self.total_power.is_finite() && self.total_power >= 0.0) {
            return Err(invariant(format!("total power {} is not a non-negative number", self.total_power)));
        }
        for (what, map) in [("power", &self.component_power), ("area", &self.component_area)] {
            let Some(map) = map else { continue };
            if map.len() != ComponentId::COUNT {
                return Err(invariant(format!(
                    "component {what} covers {} of {} components",
                    map.len(),
                    ComponentId::COUNT
                )));
            }
            if let Some((c, v)) = map.iter().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
                return Err(invariant(format!("component {what} for {c} is {v}")));
            }
        }
        if let Some(parts) = &self.component_power {
            let sum: f64 = parts.values().sum();
            if (sum - self.total_power).abs() > 1e-6 * self.total_power {
                return Err(invariant(format!(
                    "component powers sum to {sum} but total is {}",
                    self.total_power
                )));
            }
        }
        Ok(())
    }

    pub fn component_power_of(&self, c: ComponentId) -> Result<f64> {
        self.component_power
            .as_ref()
            .and_then(|m| m.get(&c).copied())
            .ok_or_else(|| PandaError::MissingLabels(format!("{}: no component power for {c}", self.key())))
    }

    pub fn total_area(&self) -> Option<f64> {
        self.component_area.as_ref().map(|m| m.values().sum())
    }

    /// Ground-truth energy in joules, when cycles are labeled.
    pub fn energy(&self) -> Option<f64> {
        self.true_cycles
            .map(|c| self.total_power * c as f64 / self.events.frequency_hz)
    }
}

/// A validated collection of samples sharing one event registry.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub schema_version: String,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let ds = Dataset {
            samples,
            schema_version: SCHEMA_VERSION.to_string(),
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen: BTreeMap<&str, &DesignConfiguration> = BTreeMap::new();
        for s in &self.samples {
            s.validate()?;
            match seen.get(s.config.id.as_str()) {
                Some(prev) if !prev.same_parameters(&s.config) => {
                    return Err(PandaError::Invariant {
                        sample: s.key(),
                        message: format!("configuration {} redefined with different parameters", s.config.id),
                    })
                }
                Some(_) => {}
                None => {
                    seen.insert(&s.config.id, &s.config);
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Distinct configuration ids in order of first appearance.
    pub fn config_ids(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        self.samples
            .iter()
            .filter(|s| seen.insert(s.config.id.clone()))
            .map(|s| s.config.id.clone())
            .collect()
    }

    /// Distinct configurations in order of first appearance.
    pub fn configs(&self) -> Vec<DesignConfiguration> {
        let mut seen = BTreeSet::new();
        self.samples
            .iter()
            .filter(|s| seen.insert(s.config.id.clone()))
            .map(|s| s.config.clone())
            .collect()
    }

    pub fn workloads(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        self.samples
            .iter()
            .filter(|s| seen.insert(s.events.workload.clone()))
            .map(|s| s.events.workload.clone())
            .collect()
    }

    pub fn samples_for<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Sample> + 'a {
        self.samples.iter().filter(move |s| s.config.id == id)
    }

    /// Samples whose configuration id is in `ids`, keeping dataset order.
    pub fn subset<S: AsRef<str>>(&self, ids: &[S]) -> Dataset {
        let keep: BTreeSet<&str> = ids.iter().map(|s| s.as_ref()).collect();
        Dataset {
            samples: self
                .samples
                .iter()
                .filter(|s| keep.contains(s.config.id.as_str()))
                .cloned()
                .collect(),
            schema_version: self.schema_version.clone(),
        }
    }

    pub(crate) fn require_non_empty(&self, what: &str) -> Result<()> {
        if self.is_empty() {
            Err(PandaError::EmptyDataset(what.to_string()))
        } else {
            Ok(())
        }
    }

    pub(crate) fn require_component_power(&self) -> Result<()> {
        match self.samples.iter().find(|s| s.component_power.is_none()) {
            Some(s) => Err(PandaError::MissingLabels(format!("{}: no component power", s.key()))),
            None => Ok(()),
        }
    }
}
