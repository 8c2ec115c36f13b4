//! The per-component power model.
//!
//! For every component a boosted ensemble learns `power / F_res` from the
//! component's configuration parameters and event rates; at prediction time
//! the ensemble output is multiplied back by `F_res` and the thirteen
//! component estimates are summed.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::events::{self, EventVector, NUM_CYCLES};
use crate::dataset::{ComponentId, ComponentMap, ConfigParam, Dataset, DesignConfiguration, Sample};
use crate::error::{PandaError, Result};
use crate::par;
use crate::regressor::{self, decode_tagged, BoostedEnsemble, FeatureMatrix, FeatureRow, TrainOptions};
use crate::resource::{eval_resource, fit_resource_params, ResourceParams};

pub const FORMAT_TAG: &str = "panda-model-1";

/// Which inputs feed one component's regressor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentFeatureSpec {
    /// `None` for whole-core models.
    pub component: Option<ComponentId>,
    pub config_features: Vec<String>,
    pub event_features: Vec<String>,
    pub normalize_events: bool,
}

fn config_params_for(component: ComponentId) -> Vec<ConfigParam> {
    use ConfigParam as P;
    match component {
        ComponentId::BP => vec![P::FetchWidth, P::BranchCount],
        ComponentId::IFU => vec![P::FetchWidth, P::DecodeWidth, P::FetchBufferEntry, P::ICacheFetchBytes],
        ComponentId::ITLB => vec![P::DTLBEntry],
        ComponentId::ICache => vec![P::ICacheWay, P::ICacheFetchBytes],
        ComponentId::RNU => vec![P::DecodeWidth],
        ComponentId::ROB => vec![P::DecodeWidth, P::RobEntry],
        ComponentId::ISU => vec![P::DecodeWidth, P::MemIssueWidth, P::FpIssueWidth, P::IntIssueWidth],
        ComponentId::Regfile => vec![P::DecodeWidth, P::IntPhyRegister, P::FpPhyRegister],
        ComponentId::FUPool => vec![P::MemIssueWidth, P::FpIssueWidth, P::IntIssueWidth],
        ComponentId::LSU => vec![P::LDQEntry, P::STQEntry, P::MemIssueWidth],
        ComponentId::DTLB => vec![P::DTLBEntry],
        ComponentId::DCache => vec![P::DCacheWay, P::DTLBEntry, P::DCacheMSHR, P::MemIssueWidth],
        ComponentId::OtherLogic => ConfigParam::ALL.to_vec(),
    }
}

impl ComponentFeatureSpec {
    /// The standard per-component feature lists.
    pub fn standard(component: ComponentId, normalize_events: bool) -> Self {
        ComponentFeatureSpec {
            component: Some(component),
            config_features: config_params_for(component).iter().map(|p| p.name().to_string()).collect(),
            event_features: events::events_for(component).iter().map(|s| s.to_string()).collect(),
            normalize_events,
        }
    }

    /// Every configuration parameter and every event.
    pub fn all_features(normalize_events: bool) -> Self {
        ComponentFeatureSpec {
            component: None,
            config_features: ConfigParam::ALL.iter().map(|p| p.name().to_string()).collect(),
            event_features: events::all_event_names().iter().map(|s| s.to_string()).collect(),
            normalize_events,
        }
    }

    /// Configuration parameters only.
    pub fn config_only(component: ComponentId) -> Self {
        ComponentFeatureSpec {
            component: Some(component),
            config_features: config_params_for(component).iter().map(|p| p.name().to_string()).collect(),
            event_features: Vec::new(),
            normalize_events: false,
        }
    }

    pub fn feature_names(&self) -> Vec<String> {
        let suffix = if self.normalize_events { "_rate" } else { "" };
        self.config_features
            .iter()
            .cloned()
            .chain(self.event_features.iter().map(|e| format!("{e}{suffix}")))
            .collect()
    }
}

/// A feature row plus the counters that were absent and imputed as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltFeatures {
    pub row: FeatureRow,
    pub imputed: Vec<String>,
}

/// Assembles one regressor input row: configuration values verbatim, then
/// event counts (divided by `numCycles` when normalizing).
pub fn build_features(spec: &ComponentFeatureSpec, config: &DesignConfiguration, ev: &EventVector) -> Result<BuiltFeatures> {
    let cycles = ev.count(NUM_CYCLES).unwrap_or(ev.baseline_cycles);
    if spec.normalize_events && cycles == 0 {
        return Err(PandaError::Data(format!(
            "{}: numCycles is 0, cannot normalize events",
            ev.workload
        )));
    }
    let mut row = FeatureRow::default();
    for name in &spec.config_features {
        let p: ConfigParam = name.parse()?;
        row.push(name.clone(), config.get(p) as f64);
    }
    let mut imputed = Vec::new();
    for name in &spec.event_features {
        let raw = match ev.count(name) {
            Some(v) => v as f64,
            None => {
                imputed.push(name.clone());
                0.0
            }
        };
        if spec.normalize_events {
            row.push(format!("{name}_rate"), raw / cycles as f64);
        } else {
            row.push(name.clone(), raw);
        }
    }
    Ok(BuiltFeatures { row, imputed })
}

/// Builds a design matrix for `spec` over `samples`.
pub(crate) fn design_matrix<'a, I>(spec: &ComponentFeatureSpec, samples: I) -> Result<FeatureMatrix>
where
    I: IntoIterator<Item = &'a Sample>,
{
    let mut m = FeatureMatrix::new(spec.feature_names());
    for s in samples {
        let built = build_features(spec, &s.config, &s.events)?;
        m.push_row(&built.row.values)?;
    }
    Ok(m)
}

/// Per-component power prediction.
pub type PowerBreakdown = ComponentMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentModel {
    pub spec: ComponentFeatureSpec,
    pub ensemble: BoostedEnsemble,
}

/// Fitted resource parameters plus one regressor per component.
#[derive(Debug, Clone, PartialEq)]
pub struct PandaPowerModel {
    pub resource_params: ResourceParams,
    pub per_component: BTreeMap<ComponentId, ComponentModel>,
    pub train_options: TrainOptions,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireModel {
    format: String,
    resource_params: ResourceParams,
    train_options: TrainOptions,
    components: Vec<ComponentModel>,
}

impl PandaPowerModel {
    fn component(&self, c: ComponentId) -> Result<&ComponentModel> {
        self.per_component
            .get(&c)
            .ok_or_else(|| PandaError::Model(format!("model has no regressor for {c}")))
    }

    pub fn to_json(&self) -> String {
        let wire = WireModel {
            format: FORMAT_TAG.into(),
            resource_params: self.resource_params.clone(),
            train_options: self.train_options,
            components: self.per_component.values().cloned().collect(),
        };
        serde_json::to_string(&wire).expect("model serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let wire: WireModel = decode_tagged(bytes, FORMAT_TAG)?;
        let mut per_component = BTreeMap::new();
        for cm in wire.components {
            if cm.ensemble.feature_names != cm.spec.feature_names() {
                return Err(PandaError::CorruptPayload(format!(
                    "{:?}: ensemble features disagree with its spec",
                    cm.spec.component
                )));
            }
            let Some(c) = cm.spec.component else {
                return Err(PandaError::CorruptPayload("component regressor without a component".into()));
            };
            per_component.insert(c, cm);
        }
        if let Some(c) = ComponentId::ALL.iter().find(|c| !per_component.contains_key(c)) {
            return Err(PandaError::Model(format!("model bundle lacks component {c}")));
        }
        Ok(PandaPowerModel {
            resource_params: wire.resource_params,
            per_component,
            train_options: wire.train_options,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| PandaError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| PandaError::io(path, e))?;
        Self::from_json(&bytes)
    }
}

/// Options that shape how the power model is trained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PandaOptions {
    pub train: TrainOptions,
    pub normalize_events: bool,
}

impl Default for PandaOptions {
    fn default() -> Self {
        PandaOptions {
            train: TrainOptions::default(),
            normalize_events: true,
        }
    }
}

impl From<TrainOptions> for PandaOptions {
    fn from(train: TrainOptions) -> Self {
        PandaOptions {
            train,
            ..Default::default()
        }
    }
}

/// Trains the thirteen component regressors on `power / F_res`.
pub fn train_panda(train: &Dataset, opts: impl Into<PandaOptions>, defaults: &ResourceParams) -> Result<PandaPowerModel> {
    let opts = opts.into();
    train.require_non_empty("cannot train power model")?;
    train.require_component_power()?;
    let params = fit_resource_params(train, defaults)?;

    let fits = par::try_map(&ComponentId::ALL, |&component| {
        let spec = ComponentFeatureSpec::standard(component, opts.normalize_events);
        let x = design_matrix(&spec, &train.samples)?;
        let y = train
            .samples
            .iter()
            .map(|s| Ok(s.component_power_of(component)? / eval_resource(component, &s.config, &params)?))
            .collect::<Result<Vec<f64>>>()?;
        let ensemble = regressor::fit(&x, &y, &opts.train)?;
        Ok::<_, PandaError>(ComponentModel { spec, ensemble })
    })?;

    Ok(PandaPowerModel {
        resource_params: params,
        per_component: ComponentId::ALL.iter().copied().zip(fits).collect(),
        train_options: opts.train,
    })
}

/// `F_ml · F_res` for one component, floored at zero.
pub fn predict_component_power(
    model: &PandaPowerModel,
    component: ComponentId,
    config: &DesignConfiguration,
    ev: &EventVector,
) -> Result<f64> {
    let cm = model.component(component)?;
    let row = build_features(&cm.spec, config, ev)?.row;
    let unit = cm.ensemble.predict(&row)?;
    let fres = eval_resource(component, config, &model.resource_params)?;
    Ok((unit * fres).max(0.0))
}

/// Total power and its per-component breakdown.
pub fn predict_total_power(
    model: &PandaPowerModel,
    config: &DesignConfiguration,
    ev: &EventVector,
) -> Result<(f64, PowerBreakdown)> {
    let mut breakdown = PowerBreakdown::new();
    let mut total = 0.0;
    for c in ComponentId::ALL {
        let p = predict_component_power(model, c, config, ev)?;
        total += p;
        breakdown.insert(c, p);
    }
    Ok((total, breakdown))
}
