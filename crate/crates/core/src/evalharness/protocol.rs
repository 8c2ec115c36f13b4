use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{
    predict_analytical, predict_component_ml, predict_global_ml, train_analytical, train_component_ml, train_global_ml,
    AnalyticalLinearModel, ComponentMlModel, GlobalMlModel,
};
use crate::dataset::{Dataset, Fold, Sample, SplitPlan};
use crate::error::{PandaError, Result};
use crate::par;
use crate::power_model::{predict_total_power, train_panda, PandaOptions, PandaPowerModel};
use crate::quality::{predict_area, predict_cycles, predict_energy, train_area, train_perf, AreaModel, PerfCalibrator};
use crate::resource::ResourceParams;

use super::metrics::{mape, pearson_r};

/// What a protocol run trains and scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Panda,
    GlobalMl,
    ComponentMl,
    Analytical,
    Area,
    Perf,
    Energy,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::Panda,
        ModelKind::GlobalMl,
        ModelKind::ComponentMl,
        ModelKind::Analytical,
        ModelKind::Area,
        ModelKind::Perf,
        ModelKind::Energy,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ModelKind::Panda => "panda",
            ModelKind::GlobalMl => "global-ml",
            ModelKind::ComponentMl => "component-ml",
            ModelKind::Analytical => "analytical",
            ModelKind::Area => "area",
            ModelKind::Perf => "perf",
            ModelKind::Energy => "energy",
        }
    }

    /// The quantity this kind is scored against.
    pub fn label(self, s: &Sample) -> Result<f64> {
        let missing = |what: &str| PandaError::MissingLabels(format!("{}: no {what} label", s.key()));
        match self {
            ModelKind::Panda | ModelKind::GlobalMl | ModelKind::ComponentMl | ModelKind::Analytical => Ok(s.total_power),
            ModelKind::Area => s.total_area().ok_or_else(|| missing("area")),
            ModelKind::Perf => s.true_cycles.map(|c| c as f64).ok_or_else(|| missing("cycle")),
            ModelKind::Energy => s.energy().ok_or_else(|| missing("cycle")),
        }
    }

    /// Area is workload-independent, so it is scored once per configuration.
    fn per_config_only(self) -> bool {
        self == ModelKind::Area
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ModelKind {
    type Err = PandaError;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| PandaError::InvalidArgument(format!("unknown model kind {s:?}")))
    }
}

/// Shared training settings so every kind sees the same options.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub panda: PandaOptions,
    pub resource_defaults: ResourceParams,
    pub area_resource_factor: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            panda: PandaOptions::default(),
            resource_defaults: ResourceParams::default(),
            area_resource_factor: false,
        }
    }
}

/// A model of any kind, trained on one fold.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Panda(PandaPowerModel),
    GlobalMl(GlobalMlModel),
    ComponentMl(ComponentMlModel),
    Analytical(AnalyticalLinearModel),
    Area(AreaModel),
    Perf(PerfCalibrator),
    Energy(PandaPowerModel, PerfCalibrator),
}

pub fn train_model(kind: ModelKind, train: &Dataset, opts: &EvalOptions) -> Result<TrainedModel> {
    let p = opts.panda;
    Ok(match kind {
        ModelKind::Panda => TrainedModel::Panda(train_panda(train, p, &opts.resource_defaults)?),
        ModelKind::GlobalMl => TrainedModel::GlobalMl(train_global_ml(train, p)?),
        ModelKind::ComponentMl => TrainedModel::ComponentMl(train_component_ml(train, p)?),
        ModelKind::Analytical => TrainedModel::Analytical(train_analytical(train, &opts.resource_defaults)?),
        ModelKind::Area => TrainedModel::Area(train_area(
            train,
            &p.train,
            opts.area_resource_factor,
            &opts.resource_defaults,
        )?),
        ModelKind::Perf => TrainedModel::Perf(train_perf(train, &p.train)?),
        ModelKind::Energy => TrainedModel::Energy(
            train_panda(train, p, &opts.resource_defaults)?,
            train_perf(train, &p.train)?,
        ),
    })
}

impl TrainedModel {
    pub fn predict(&self, s: &Sample) -> Result<f64> {
        let (c, e) = (&s.config, &s.events);
        match self {
            TrainedModel::Panda(m) => Ok(predict_total_power(m, c, e)?.0),
            TrainedModel::GlobalMl(m) => predict_global_ml(m, c, e),
            TrainedModel::ComponentMl(m) => predict_component_ml(m, c, e),
            TrainedModel::Analytical(m) => predict_analytical(m, c),
            TrainedModel::Area(m) => Ok(predict_area(m, c)?.0),
            TrainedModel::Perf(m) => predict_cycles(m, c, e),
            TrainedModel::Energy(pm, cal) => predict_energy(pm, cal, c, e),
        }
    }
}

/// Metrics over one test configuration's workloads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigMetrics {
    pub config_id: String,
    pub mape: f64,
    /// Undefined for fewer than two points or a constant series.
    pub r: Option<f64>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub config_id: String,
    pub workload: String,
    pub label: f64,
    pub prediction: f64,
    /// How many folds tested this point; predictions are averaged over them.
    pub folds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model_tag: String,
    pub per_config: Vec<ConfigMetrics>,
    /// Mean of the per-configuration MAPEs.
    pub aggregate_mape: f64,
    /// Mean of the defined per-configuration correlations.
    pub aggregate_r: Option<f64>,
    /// Correlation over every scored point at once.
    pub pooled_r: Option<f64>,
    pub folds: SplitPlan,
    pub models_trained: usize,
    pub predictions: Vec<Prediction>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per configuration.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("config_id,mape,r,points\n");
        for m in &self.per_config {
            let r = m.r.map(|r| r.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", m.config_id, m.mape, r, m.points));
        }
        out
    }

    pub fn metrics_for(&self, id: &str) -> Option<&ConfigMetrics> {
        self.per_config.iter().find(|m| m.config_id == id)
    }
}

fn correlation(labels: &[f64], preds: &[f64]) -> Option<f64> {
    pearson_r(labels, preds).ok()
}

fn run_fold(ds: &Dataset, fold: &Fold, kind: ModelKind, opts: &EvalOptions) -> Result<Vec<(String, String, f64)>> {
    let model = train_model(kind, &ds.subset(&fold.train), opts)?;
    let mut out = Vec::new();
    for id in &fold.test {
        for s in ds.samples_for(id) {
            out.push((s.config.id.clone(), s.workload().to_string(), model.predict(s)?));
            if kind.per_config_only() {
                break;
            }
        }
    }
    Ok(out)
}

/// Trains one model per fold and scores every test point.
///
/// A point tested by several folds is scored on the mean of their
/// predictions. Folds run in parallel; the report is assembled in fold order.
pub fn run_protocol(ds: &Dataset, plan: &SplitPlan, kind: ModelKind, opts: &EvalOptions) -> Result<EvalReport> {
    ds.require_non_empty("cannot evaluate")?;
    plan.validate(&ds.config_ids())?;
    if plan.folds.is_empty() {
        return Err(PandaError::InvalidArgument("split plan has no folds".into()));
    }
    let fold_preds = par::try_map(&plan.folds, |f| run_fold(ds, f, kind, opts))?;

    let mut acc: BTreeMap<(String, String), (f64, usize)> = BTreeMap::new();
    for preds in &fold_preds {
        for (id, w, p) in preds {
            let e = acc.entry((id.clone(), w.clone())).or_insert((0.0, 0));
            e.0 += p;
            e.1 += 1;
        }
    }

    let mut predictions = Vec::new();
    let mut per_config = Vec::new();
    for id in ds.config_ids() {
        let mut labels = Vec::new();
        let mut preds = Vec::new();
        for s in ds.samples_for(&id) {
            let Some(&(sum, n)) = acc.get(&(id.clone(), s.workload().to_string())) else {
                continue;
            };
            let label = kind.label(s)?;
            let prediction = sum / n as f64;
            labels.push(label);
            preds.push(prediction);
            predictions.push(Prediction {
                config_id: id.clone(),
                workload: s.workload().to_string(),
                label,
                prediction,
                folds: n,
            });
        }
        if labels.is_empty() {
            continue;
        }
        per_config.push(ConfigMetrics {
            config_id: id,
            mape: mape(&labels, &preds)?,
            r: correlation(&labels, &preds),
            points: labels.len(),
        });
    }

    let aggregate_mape = per_config.iter().map(|m| m.mape).sum::<f64>() / per_config.len() as f64;
    let rs: Vec<f64> = per_config.iter().filter_map(|m| m.r).collect();
    let aggregate_r = (!rs.is_empty()).then(|| rs.iter().sum::<f64>() / rs.len() as f64);
    let all_labels: Vec<f64> = predictions.iter().map(|p| p.label).collect();
    let all_preds: Vec<f64> = predictions.iter().map(|p| p.prediction).collect();
    Ok(EvalReport {
        model_tag: kind.tag().into(),
        per_config,
        aggregate_mape,
        aggregate_r,
        pooled_r: correlation(&all_labels, &all_preds),
        folds: plan.clone(),
        models_trained: plan.folds.len(),
        predictions,
    })
}

pub const SPECIAL_IDS: [&str; 2] = ["SP1", "SP2"];

/// Trains on C1..C15 and scores the two special designs. Correlation is not reported.
pub fn run_special_case(ds: &Dataset, kind: ModelKind, opts: &EvalOptions) -> Result<EvalReport> {
    let ids = ds.config_ids();
    for sp in SPECIAL_IDS {
        if !ids.iter().any(|i| i == sp) {
            return Err(PandaError::Data(format!("special configuration {sp} missing from dataset")));
        }
    }
    let train: Vec<String> = (1..=15).map(|i| format!("C{i}")).collect();
    let plan = SplitPlan {
        folds: vec![Fold {
            train,
            test: SPECIAL_IDS.iter().map(|s| s.to_string()).collect(),
        }],
    };
    let mut report = run_protocol(ds, &plan, kind, opts)?;
    for m in &mut report.per_config {
        m.r = None;
    }
    report.aggregate_r = None;
    report.pooled_r = None;
    Ok(report)
}
