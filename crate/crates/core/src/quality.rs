//! Area, cycle-count and energy prediction.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bundle::tagged_io;
use crate::dataset::events::PERF_EVENTS;
use crate::dataset::{ComponentId, ConfigParam, Dataset, DesignConfiguration, EventVector, Sample};
use crate::error::{PandaError, Result};
use crate::par;
use crate::power_model::{build_features, design_matrix, predict_total_power, ComponentFeatureSpec, ComponentModel, PandaPowerModel};
use crate::regressor::{self, FeatureMatrix, TrainOptions};
use crate::resource::{eval_resource, fit_resource_params, ResourceParams};

pub const AREA_TAG: &str = "panda-area-1";
pub const PERF_TAG: &str = "panda-perf-1";

/// Per-component area regressors over configuration parameters only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaModel {
    pub per_component: BTreeMap<ComponentId, ComponentModel>,
    /// When set, regressors learn `area / F_res` and predictions are multiplied back.
    pub use_resource_factor: bool,
    pub resource_params: ResourceParams,
}

/// Learns the ratio between true and simulator-reported cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfCalibrator {
    pub model: ComponentModel,
}

tagged_io!(AreaModel, AREA_TAG);
tagged_io!(PerfCalibrator, PERF_TAG);

/// One sample per configuration, in order of first appearance.
fn one_per_config(train: &Dataset) -> Vec<&Sample> {
    let mut seen = std::collections::BTreeSet::new();
    train.samples.iter().filter(|s| seen.insert(s.config.id.clone())).collect()
}

fn area_of(s: &Sample, c: ComponentId) -> Result<f64> {
    s.component_area
        .as_ref()
        .and_then(|m| m.get(&c).copied())
        .ok_or_else(|| PandaError::MissingLabels(format!("{}: no area label for {c}", s.key())))
}

pub fn train_area(
    train: &Dataset,
    opts: &TrainOptions,
    use_resource_factor: bool,
    defaults: &ResourceParams,
) -> Result<AreaModel> {
    train.require_non_empty("cannot train area model")?;
    let rows = one_per_config(train);
    for s in &rows {
        for c in ComponentId::ALL {
            area_of(s, c)?;
        }
    }
    let resource_params = if use_resource_factor {
        // Bias fitting reads component power, so present areas in that slot.
        let view = Dataset {
            samples: rows
                .iter()
                .map(|s| Sample {
                    component_power: s.component_area.clone(),
                    ..(*s).clone()
                })
                .collect(),
            schema_version: train.schema_version.clone(),
        };
        fit_resource_params(&view, defaults)?
    } else {
        defaults.clone()
    };

    let fits = par::try_map(&ComponentId::ALL, |&c| {
        let spec = ComponentFeatureSpec::config_only(c);
        let x = design_matrix(&spec, rows.iter().copied())?;
        let y = rows
            .iter()
            .map(|s| {
                let a = area_of(s, c)?;
                Ok(if use_resource_factor {
                    a / eval_resource(c, &s.config, &resource_params)?
                } else {
                    a
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok::<_, PandaError>(ComponentModel {
            spec,
            ensemble: regressor::fit(&x, &y, opts)?,
        })
    })?;
    Ok(AreaModel {
        per_component: ComponentId::ALL.iter().copied().zip(fits).collect(),
        use_resource_factor,
        resource_params,
    })
}

/// Total area and its breakdown; independent of any workload.
pub fn predict_area(model: &AreaModel, config: &DesignConfiguration) -> Result<(f64, BTreeMap<ComponentId, f64>)> {
    let mut parts = BTreeMap::new();
    for c in ComponentId::ALL {
        let cm = model
            .per_component
            .get(&c)
            .ok_or_else(|| PandaError::Model(format!("area model lacks {c}")))?;
        let mut row = crate::regressor::FeatureRow::default();
        for name in &cm.spec.config_features {
            let p: ConfigParam = name.parse()?;
            row.push(name.clone(), config.get(p) as f64);
        }
        let mut a = cm.ensemble.predict(&row)?;
        if model.use_resource_factor {
            a *= eval_resource(c, config, &model.resource_params)?;
        }
        parts.insert(c, a.max(0.0));
    }
    Ok((parts.values().sum(), parts))
}

pub fn perf_feature_spec() -> ComponentFeatureSpec {
    ComponentFeatureSpec {
        component: None,
        config_features: ConfigParam::ALL.iter().map(|p| p.name().to_string()).collect(),
        event_features: PERF_EVENTS.iter().map(|s| s.to_string()).collect(),
        normalize_events: true,
    }
}

pub fn train_perf(train: &Dataset, opts: &TrainOptions) -> Result<PerfCalibrator> {
    train.require_non_empty("cannot train performance model")?;
    let spec = perf_feature_spec();
    let mut x = FeatureMatrix::new(spec.feature_names());
    let mut y = Vec::with_capacity(train.len());
    for s in &train.samples {
        let truth = s
            .true_cycles
            .ok_or_else(|| PandaError::MissingLabels(format!("{}: no cycle label", s.key())))?;
        if s.events.baseline_cycles == 0 || truth == 0 {
            return Err(PandaError::Data(format!("{}: cycle counts must be positive", s.key())));
        }
        x.push_row(&build_features(&spec, &s.config, &s.events)?.row.values)?;
        y.push(truth as f64 / s.events.baseline_cycles as f64);
    }
    Ok(PerfCalibrator {
        model: ComponentModel {
            spec,
            ensemble: regressor::fit(&x, &y, opts)?,
        },
    })
}

/// `ratio · baseline_cycles`, floored at one cycle.
pub fn predict_cycles(cal: &PerfCalibrator, config: &DesignConfiguration, ev: &EventVector) -> Result<f64> {
    let row = build_features(&cal.model.spec, config, ev)?.row;
    let ratio = cal.model.ensemble.predict(&row)?;
    Ok((ratio * ev.baseline_cycles as f64).max(1.0))
}

/// `power · cycles / frequency`, in joules.
pub fn predict_energy(
    power_model: &PandaPowerModel,
    cal: &PerfCalibrator,
    config: &DesignConfiguration,
    ev: &EventVector,
) -> Result<f64> {
    let (power, _) = predict_total_power(power_model, config, ev)?;
    let cycles = predict_cycles(cal, config, ev)?;
    Ok(energy(power, cycles, ev.frequency_hz))
}

pub fn energy(power_w: f64, cycles: f64, frequency_hz: f64) -> f64 {
    power_w * cycles / frequency_hz
}
