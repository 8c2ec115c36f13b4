//! Design-space exploration under a power budget.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{builtin, ConfigParam, Dataset, DesignConfiguration, EventVector};
use crate::dataset::events::{lookup, EventKind};
use crate::error::{PandaError, Result};
use crate::par;
use crate::power_model::{predict_total_power, PandaPowerModel};
use crate::quality::{predict_cycles, PerfCalibrator};
use crate::synth::SynthSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseConfig {
    Builtin(String),
    Explicit(DesignConfiguration),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Operand {
    Number(f64),
    Param(String),
}

/// A coupling rule such as `DecodeWidth <= FetchWidth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rule {
    pub lhs: String,
    pub op: CmpOp,
    pub rhs: Operand,
}

impl Rule {
    pub fn holds(&self, c: &DesignConfiguration) -> Result<bool> {
        let l = c.get(self.lhs.parse()?) as f64;
        let r = match &self.rhs {
            Operand::Number(v) => *v,
            Operand::Param(p) => c.get(p.parse()?) as f64,
        };
        Ok(match self.op {
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
            CmpOp::Ge => l >= r,
            CmpOp::Gt => l > r,
        })
    }
}

/// Finite per-parameter grids over a base design, plus coupling rules.
///
/// Parameters without a grid keep the base value. A parameter listed in
/// `ties` copies another parameter's value instead of being enumerated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpace {
    pub base: BaseConfig,
    pub grid: BTreeMap<String, Vec<u32>>,
    #[serde(default)]
    pub ties: BTreeMap<String, String>,
    #[serde(default)]
    pub rules: Vec<Rule>,
}

impl DesignSpace {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| PandaError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| PandaError::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    fn base_config(&self) -> Result<DesignConfiguration> {
        match &self.base {
            BaseConfig::Builtin(id) => {
                builtin(id).ok_or_else(|| PandaError::InvalidArgument(format!("unknown built-in configuration {id:?}")))
            }
            BaseConfig::Explicit(c) => Ok(c.clone()),
        }
    }

    /// Grid axes in canonical parameter order.
    fn axes(&self) -> Result<Vec<(ConfigParam, &[u32])>> {
        let mut axes = Vec::new();
        for (name, values) in &self.grid {
            let p: ConfigParam = name.parse()?;
            if values.is_empty() {
                return Err(PandaError::InvalidArgument(format!("grid for {name} is empty")));
            }
            if self.ties.contains_key(name) {
                return Err(PandaError::InvalidArgument(format!("{name} is both gridded and tied")));
            }
            axes.push((p, values.as_slice()));
        }
        axes.sort_by_key(|(p, _)| ConfigParam::ALL.iter().position(|q| q == p));
        Ok(axes)
    }

    /// Number of grid points before any rule is applied.
    pub fn size(&self) -> Result<usize> {
        Ok(self.axes()?.iter().map(|(_, v)| v.len()).product())
    }

    /// Lexicographic enumeration (last canonical parameter fastest), rule-filtered.
    /// Points that are not valid configurations are dropped as well.
    pub fn enumerate(&self) -> Result<Vec<DesignConfiguration>> {
        let base = self.base_config()?;
        let axes = self.axes()?;
        let ties = self
            .ties
            .iter()
            .map(|(dst, src)| Ok((dst.parse::<ConfigParam>()?, src.parse::<ConfigParam>()?)))
            .collect::<Result<Vec<_>>>()?;
        let total = self.size()?;
        let mut out = Vec::new();
        let mut idx = vec![0usize; axes.len()];
        for n in 0..total {
            let mut c = base.clone();
            c.id = format!("X{:05}", n + 1);
            for ((p, values), i) in axes.iter().zip(&idx) {
                c.set(*p, values[*i]);
            }
            for (dst, src) in &ties {
                c.set(*dst, c.get(*src));
            }
            let mut keep = c.validate().is_ok();
            for r in &self.rules {
                keep = keep && r.holds(&c)?;
            }
            if keep {
                out.push(c);
            }
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < axes[k].1.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
        if out.is_empty() {
            return Err(PandaError::InvalidArgument("design space is empty after filtering".into()));
        }
        Ok(out)
    }
}

/// Supplies representative workload events for a configuration that may never have been simulated.
pub trait EventsProvider: Sync {
    fn events(&self, config: &DesignConfiguration) -> Result<Vec<EventVector>>;
}

/// The synthetic generator acts as a simulator for any configuration.
impl EventsProvider for SynthSpec {
    fn events(&self, config: &DesignConfiguration) -> Result<Vec<EventVector>> {
        self.workloads
            .iter()
            .map(|w| Ok(self.oracle_sample(config, &w.name)?.events))
            .collect()
    }
}

/// Reuses the events of the closest simulated design for each workload.
///
/// Closeness is the L1 distance between log2 parameter values. Event counts
/// are copied; cycle counters are rescaled by `sqrt(DecodeWidth_ref / DecodeWidth)`
/// as a crude throughput adjustment.
pub struct ScaledRatesProvider {
    dataset: Dataset,
}

impl ScaledRatesProvider {
    pub fn new(dataset: Dataset) -> Result<Self> {
        dataset.require_non_empty("events provider needs simulated samples")?;
        Ok(ScaledRatesProvider { dataset })
    }

    fn distance(a: &DesignConfiguration, b: &DesignConfiguration) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| ((*x as f64).log2() - (y as f64).log2()).abs())
            .sum()
    }
}

impl EventsProvider for ScaledRatesProvider {
    fn events(&self, config: &DesignConfiguration) -> Result<Vec<EventVector>> {
        let mut out = Vec::new();
        for w in self.dataset.workloads() {
            let nearest = self
                .dataset
                .samples
                .iter()
                .filter(|s| s.workload() == w)
                .min_by(|a, b| Self::distance(&a.config, config).total_cmp(&Self::distance(&b.config, config)))
                .expect("every listed workload has a sample");
            let scale = (nearest.config.decode_width as f64 / config.decode_width as f64).sqrt();
            let mut ev = nearest.events.clone();
            for (name, v) in ev.counts.iter_mut() {
                if matches!(lookup(name).map(|d| d.kind), Some(EventKind::Cycles | EventKind::Cycle)) {
                    *v = ((*v as f64) * scale).round().max(1.0) as u64;
                }
            }
            ev.baseline_cycles = ev.counts[crate::dataset::events::NUM_CYCLES];
            out.push(ev);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub rank: usize,
    pub config: DesignConfiguration,
    pub predicted_power: f64,
    pub predicted_perf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DseResult {
    pub constraint: f64,
    pub tolerance: f64,
    pub evaluated: usize,
    pub feasible: usize,
    pub candidates: Vec<Candidate>,
}

impl DseResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank");
        for p in ConfigParam::ALL {
            out.push(',');
            out.push_str(p.name());
        }
        out.push_str(",predicted_power_w,predicted_perf\n");
        for c in &self.candidates {
            out.push_str(&c.rank.to_string());
            for v in c.config.values() {
                out.push_str(&format!(",{v}"));
            }
            out.push_str(&format!(",{},{}\n", c.predicted_power, c.predicted_perf));
        }
        out
    }
}

/// Predicted mean power and per-workload cycles for one configuration.
pub struct Score {
    pub power: f64,
    pub cycles: BTreeMap<String, f64>,
}

pub fn score(
    config: &DesignConfiguration,
    power_model: &PandaPowerModel,
    perf_model: &PerfCalibrator,
    provider: &dyn EventsProvider,
) -> Result<Score> {
    let evs = provider.events(config)?;
    if evs.is_empty() {
        return Err(PandaError::Data(format!("no events for {}", config.id)));
    }
    let mut power = 0.0;
    let mut cycles = BTreeMap::new();
    for ev in &evs {
        power += predict_total_power(power_model, config, ev)?.0;
        cycles.insert(ev.workload.clone(), predict_cycles(perf_model, config, ev)?);
    }
    Ok(Score {
        power: power / evs.len() as f64,
        cycles,
    })
}

/// Mean over workloads of `reference_cycles / cycles`.
pub fn relative_perf(reference: &BTreeMap<String, f64>, cycles: &BTreeMap<String, f64>) -> Result<f64> {
    let mut sum = 0.0;
    for (w, c) in cycles {
        let r = reference
            .get(w)
            .ok_or_else(|| PandaError::Data(format!("reference has no cycles for workload {w}")))?;
        sum += r / c;
    }
    Ok(sum / cycles.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExploreOptions {
    pub constraint: f64,
    pub tolerance: f64,
    pub top_k: usize,
}

/// Scores every point of `space` and ranks the feasible ones by predicted performance.
///
/// Performance is normalized to the C1 design evaluated through the same
/// models and provider, so C1 itself scores exactly 1.
pub fn explore(
    space: &DesignSpace,
    power_model: &PandaPowerModel,
    perf_model: &PerfCalibrator,
    provider: &dyn EventsProvider,
    opts: ExploreOptions,
) -> Result<DseResult> {
    if !(opts.constraint > 0.0) || !(opts.tolerance >= 0.0) {
        return Err(PandaError::InvalidArgument("constraint must be positive and tolerance non-negative".into()));
    }
    if opts.top_k == 0 {
        return Err(PandaError::InvalidArgument("top_k must be positive".into()));
    }
    let configs = space.enumerate()?;
    let reference = score(&builtin("C1").expect("C1 is built in"), power_model, perf_model, provider)?;
    let scored = par::try_map(&configs, |c| {
        let s = score(c, power_model, perf_model, provider)?;
        Ok::<_, PandaError>((s.power, relative_perf(&reference.cycles, &s.cycles)?))
    })?;

    let limit = opts.constraint * (1.0 + opts.tolerance);
    let mut feasible: Vec<usize> = (0..configs.len()).filter(|&i| scored[i].0 <= limit).collect();
    if feasible.is_empty() {
        return Err(PandaError::NoFeasible(format!(
            "no configuration predicted at or below {limit} W among {}",
            configs.len()
        )));
    }
    feasible.sort_by(|&a, &b| scored[b].1.total_cmp(&scored[a].1).then(a.cmp(&b)));
    let n_feasible = feasible.len();
    let candidates = feasible
        .into_iter()
        .take(opts.top_k)
        .enumerate()
        .map(|(rank, i)| Candidate {
            rank: rank + 1,
            config: configs[i].clone(),
            predicted_power: scored[i].0,
            predicted_perf: scored[i].1,
        })
        .collect();
    Ok(DseResult {
        constraint: opts.constraint,
        tolerance: opts.tolerance,
        evaluated: configs.len(),
        feasible: n_feasible,
        candidates,
    })
}

/// A 2916-point space around the reference designs used by the examples and tests.
pub fn example_space() -> DesignSpace {
    let grid = [
        ("FetchWidth", vec![4, 8]),
        ("DecodeWidth", vec![1, 2, 3, 4, 5]),
        ("RobEntry", vec![32, 64, 96, 128]),
        ("IntPhyRegister", vec![64, 96, 128]),
        ("LDQEntry", vec![8, 16, 32]),
        ("IntIssueWidth", vec![1, 2, 3]),
        ("DCacheWay", vec![2, 4, 8]),
    ];
    DesignSpace {
        base: BaseConfig::Builtin("C8".into()),
        grid: grid.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        ties: [("FpPhyRegister", "IntPhyRegister"), ("STQEntry", "LDQEntry")]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        rules: vec![Rule {
            lhs: "DecodeWidth".into(),
            op: CmpOp::Le,
            rhs: Operand::Param("FetchWidth".into()),
        }],
    }
}
