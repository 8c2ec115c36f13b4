//! Comparison models sharing PANDA's features, folds and metrics.

use std::collections::BTreeMap;
use log::warn;
use serde::{Deserialize, Serialize};

use crate::dataset::{ComponentId, Dataset, DesignConfiguration, EventVector};
use crate::error::{PandaError, Result};
use crate::par;
use crate::power_model::{build_features, design_matrix, ComponentFeatureSpec, ComponentModel, PandaOptions};
use crate::bundle::tagged_io;
use crate::regressor;
use crate::resource::{eval_resource, per_config_means, ResourceParams};
use crate::stats;

pub const GLOBAL_TAG: &str = "panda-global-1";
pub const COMPONENT_TAG: &str = "panda-compml-1";
pub const ANALYTICAL_TAG: &str = "panda-analytical-1";

/// One ensemble over every configuration parameter and every event, on total power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalMlModel {
    pub model: ComponentModel,
}

/// One ensemble per component on raw component power, no resource factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentMlModel {
    pub per_component: BTreeMap<ComponentId, ComponentModel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearLaw {
    pub slope: f64,
    pub intercept: f64,
}

/// Workload-independent `slope · F_res + intercept` per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticalLinearModel {
    pub resource_params: ResourceParams,
    pub per_component: BTreeMap<ComponentId, LinearLaw>,
}

pub fn train_global_ml(train: &Dataset, opts: impl Into<PandaOptions>) -> Result<GlobalMlModel> {
    let opts = opts.into();
    train.require_non_empty("cannot train global model")?;
    let spec = ComponentFeatureSpec::all_features(opts.normalize_events);
    let x = design_matrix(&spec, &train.samples)?;
    let y: Vec<f64> = train.samples.iter().map(|s| s.total_power).collect();
    let ensemble = regressor::fit(&x, &y, &opts.train)?;
    Ok(GlobalMlModel {
        model: ComponentModel { spec, ensemble },
    })
}

pub fn predict_global_ml(model: &GlobalMlModel, config: &DesignConfiguration, ev: &EventVector) -> Result<f64> {
    let row = build_features(&model.model.spec, config, ev)?.row;
    Ok(model.model.ensemble.predict(&row)?.max(0.0))
}

pub fn train_component_ml(train: &Dataset, opts: impl Into<PandaOptions>) -> Result<ComponentMlModel> {
    let opts = opts.into();
    train.require_non_empty("cannot train component model")?;
    train.require_component_power()?;
    let fits = par::try_map(&ComponentId::ALL, |&c| {
        let spec = ComponentFeatureSpec::standard(c, opts.normalize_events);
        let x = design_matrix(&spec, &train.samples)?;
        let y = train
            .samples
            .iter()
            .map(|s| s.component_power_of(c))
            .collect::<Result<Vec<f64>>>()?;
        let ensemble = regressor::fit(&x, &y, &opts.train)?;
        Ok::<_, PandaError>(ComponentModel { spec, ensemble })
    })?;
    Ok(ComponentMlModel {
        per_component: ComponentId::ALL.iter().copied().zip(fits).collect(),
    })
}

pub fn predict_component_ml(model: &ComponentMlModel, config: &DesignConfiguration, ev: &EventVector) -> Result<f64> {
    let mut total = 0.0;
    for c in ComponentId::ALL {
        let cm = model
            .per_component
            .get(&c)
            .ok_or_else(|| PandaError::Model(format!("component model lacks {c}")))?;
        let row = build_features(&cm.spec, config, ev)?.row;
        total += cm.ensemble.predict(&row)?.max(0.0);
    }
    Ok(total)
}

/// Least squares of per-configuration mean power against `F_res`.
///
/// When the training set holds a single distinct `F_res` value the law
/// degenerates to the proportional fit through that point.
pub fn train_analytical(train: &Dataset, defaults: &ResourceParams) -> Result<AnalyticalLinearModel> {
    train.require_non_empty("cannot train analytical model")?;
    train.require_component_power()?;
    let params = crate::resource::fit_resource_params(train, defaults)?;
    let mut per_component = BTreeMap::new();
    for c in ComponentId::ALL {
        let points = per_config_means(train, |s| s.component_power_of(c))?;
        let xs = points
            .iter()
            .map(|(cfg, _)| eval_resource(c, cfg, &params))
            .collect::<Result<Vec<f64>>>()?;
        let ys: Vec<f64> = points.iter().map(|(_, p)| *p).collect();
        let law = match stats::linear_fit(&xs, &ys) {
            Some((slope, intercept)) => LinearLaw { slope, intercept },
            None => {
                let mean = stats::mean(&ys);
                let x = xs[0];
                if stats::distinct_count(&xs) == 1 && c != ComponentId::FUPool {
                    warn!("{c}: a single distinct resource value in training data; using a proportional law");
                }
                if x > 0.0 {
                    LinearLaw {
                        slope: mean / x,
                        intercept: 0.0,
                    }
                } else {
                    LinearLaw {
                        slope: 0.0,
                        intercept: mean,
                    }
                }
            }
        };
        per_component.insert(c, law);
    }
    Ok(AnalyticalLinearModel {
        resource_params: params,
        per_component,
    })
}

/// Ignores the workload entirely.
pub fn predict_analytical(model: &AnalyticalLinearModel, config: &DesignConfiguration) -> Result<f64> {
    let mut total = 0.0;
    for c in ComponentId::ALL {
        let law = model
            .per_component
            .get(&c)
            .ok_or_else(|| PandaError::Model(format!("analytical model lacks {c}")))?;
        let f = eval_resource(c, config, &model.resource_params)?;
        total += (law.slope * f + law.intercept).max(0.0);
    }
    Ok(total)
}

tagged_io!(GlobalMlModel, GLOBAL_TAG);
tagged_io!(ComponentMlModel, COMPONENT_TAG);
tagged_io!(AnalyticalLinearModel, ANALYTICAL_TAG);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{builtin, ComponentMap, Sample, TechnologyNode};
    use crate::evalharness::mape;
    use crate::regressor::TrainOptions;
    use crate::synth::{generate, SynthSpec};
    use std::collections::BTreeMap;

    fn const_dataset(total: f64) -> Dataset {
        let mut samples = Vec::new();
        for id in ["C1", "C5", "C9"] {
            for w in ["a", "b"] {
                let mut counts = BTreeMap::new();
                counts.insert("numCycles".to_string(), 100);
                counts.insert("numInsts".to_string(), if w == "a" { 50 } else { 80 });
                let parts: ComponentMap = ComponentId::ALL.iter().map(|&c| (c, total / 13.0)).collect();
                samples.push(Sample {
                    config: builtin(id).unwrap(),
                    tech: TechnologyNode::tsmc40(),
                    events: EventVector::new(w, counts, 100, 1e9).unwrap(),
                    total_power: parts.values().sum(),
                    component_power: Some(parts),
                    true_cycles: None,
                    component_area: None,
                });
            }
        }
        Dataset::new(samples).unwrap()
    }

    #[test]
    fn constant_labels_give_constant_predictors() {
        let ds = const_dataset(1.3);
        let g = train_global_ml(&ds, TrainOptions::default()).unwrap();
        let c = train_component_ml(&ds, TrainOptions::default()).unwrap();
        let probe = builtin("C15").unwrap();
        for s in &ds.samples {
            assert!((predict_global_ml(&g, &probe, &s.events).unwrap() - s.total_power).abs() < 1e-12);
            assert!((predict_component_ml(&c, &probe, &s.events).unwrap() - s.total_power).abs() < 1e-12);
        }
    }

    #[test]
    fn analytical_two_point_fit() {
        // F_res(ROB) is 16 for C1 and 32 for C2; 4 mW and 8 mW give 0.25 mW per entry.
        let mut ds = const_dataset(1.0).subset(&["C1"]);
        let mut c2 = ds.samples.clone();
        for s in &mut c2 {
            s.config = builtin("C2").unwrap();
        }
        ds.samples.extend(c2);
        for s in &mut ds.samples {
            let parts = s.component_power.as_mut().unwrap();
            let rob = if s.config.id == "C1" { 4e-3 } else { 8e-3 };
            parts.insert(ComponentId::ROB, rob);
            s.total_power = parts.values().sum();
        }
        let m = train_analytical(&ds, &ResourceParams::default()).unwrap();
        let law = m.per_component[&ComponentId::ROB];
        assert!((law.slope - 0.25e-3).abs() < 1e-15);
        assert!(law.intercept.abs() < 1e-15);
    }

    #[test]
    fn analytical_single_resource_value_is_proportional() {
        let ds = const_dataset(1.3).subset(&["C5"]);
        let m = train_analytical(&ds, &ResourceParams::default()).unwrap();
        for (c, law) in &m.per_component {
            let f = eval_resource(*c, &builtin("C5").unwrap(), &m.resource_params).unwrap();
            assert!((law.slope * f + law.intercept - 0.1).abs() < 1e-12, "{c}");
        }
    }

    #[test]
    fn analytical_is_workload_independent_and_floored() {
        let ds = generate(&SynthSpec::default_for(1)).unwrap();
        let m = train_analytical(&ds, &ResourceParams::default()).unwrap();
        let cfg = builtin("C3").unwrap();
        let p = predict_analytical(&m, &cfg).unwrap();
        assert!(p > 0.0);
        let mut neg = m.clone();
        for law in neg.per_component.values_mut() {
            *law = LinearLaw {
                slope: -1.0,
                intercept: 0.0,
            };
        }
        assert_eq!(predict_analytical(&neg, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn analytical_exact_on_affine_laws() {
        let spec = SynthSpec::default_for(2).exact_affine();
        let ds = generate(&spec).unwrap();
        let train = ds.subset(&["C1", "C4", "C8", "C12", "C15"]);
        let m = train_analytical(&train, &ResourceParams::default()).unwrap();
        let y: Vec<f64> = ds.samples.iter().map(|s| s.total_power).collect();
        let p: Vec<f64> = ds.samples.iter().map(|s| predict_analytical(&m, &s.config).unwrap()).collect();
        assert!(mape(&y, &p).unwrap() < 1e-6);
    }

    #[test]
    fn round_trips_preserve_predictions() {
        let ds = generate(&SynthSpec::default_for(3)).unwrap().subset(&["C2", "C6", "C10"]);
        let opts = TrainOptions::default().with_n_trees(8).unwrap();
        let g = train_global_ml(&ds, opts).unwrap();
        let c = train_component_ml(&ds, opts).unwrap();
        let a = train_analytical(&ds, &ResourceParams::default()).unwrap();
        let g2 = GlobalMlModel::from_json(g.to_json().as_bytes()).unwrap();
        let c2 = ComponentMlModel::from_json(c.to_json().as_bytes()).unwrap();
        let a2 = AnalyticalLinearModel::from_json(a.to_json().as_bytes()).unwrap();
        for s in &ds.samples {
            assert_eq!(
                predict_global_ml(&g, &s.config, &s.events).unwrap().to_bits(),
                predict_global_ml(&g2, &s.config, &s.events).unwrap().to_bits()
            );
            assert_eq!(
                predict_component_ml(&c, &s.config, &s.events).unwrap().to_bits(),
                predict_component_ml(&c2, &s.config, &s.events).unwrap().to_bits()
            );
            assert_eq!(
                predict_analytical(&a, &s.config).unwrap().to_bits(),
                predict_analytical(&a2, &s.config).unwrap().to_bits()
            );
        }
        assert!(matches!(
            GlobalMlModel::from_json(c.to_json().as_bytes()),
            Err(PandaError::VersionMismatch { .. })
        ));
    }
}
