use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use panda::baselines::{
    predict_analytical, predict_component_ml, predict_global_ml, train_analytical, train_component_ml, train_global_ml,
    AnalyticalLinearModel, ComponentMlModel, GlobalMlModel, ANALYTICAL_TAG, COMPONENT_TAG, GLOBAL_TAG,
};
use panda::dataset::{
    builtin_configurations, load_dataset, split_known_n, split_unknown_domain, write_dataset, ComponentId, Dataset,
    TechnologyNode,
};
use panda::dse::{example_space, explore, DesignSpace, EventsProvider, ExploreOptions, ScaledRatesProvider};
use panda::error::{ErrorKind, PandaError};
use panda::evalharness::{resource_diagnostics, run_protocol, run_special_case, EvalOptions, EvalReport, ModelKind};
use panda::par;
use panda::power_model::{self, predict_total_power, train_panda, PandaOptions, PandaPowerModel};
use panda::quality::{
    energy, predict_area, predict_cycles, train_area, train_perf, AreaModel, PerfCalibrator, AREA_TAG, PERF_TAG,
};
use panda::regressor::TrainOptions;
use panda::resource::{fit_resource_params, ModelConfig, ResourceParams};
use panda::synth::{generate, generate_multitech, MultiTechSpec, SynthSpec};
use panda::transfer::{
    self, cv2_scale, parse_transfer_samples, predict_transferred_power, train_transfer, transfer_samples_to_jsonl,
    TransferModel,
};

/// Component-level CPU power, area and performance modeling.
#[derive(Parser, Debug)]
#[command(name = "panda", version)]
struct Cli {
    /// Worker threads for training and evaluation (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Seed for every random choice; falls back to PANDA_SEED, then 0.
    #[arg(long, global = true, env = "PANDA_SEED")]
    seed: Option<u64>,

    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic dataset (JSON lines).
    Synth(SynthArgs),
    /// Train a model and write it to a file.
    Train(TrainArgs),
    /// Predict power, area, cycles or energy for every sample of a dataset.
    Predict(PredictArgs),
    /// Run an evaluation protocol and report MAPE and correlation.
    Eval(EvalArgs),
    /// Write resource-function diagnostics as CSV files.
    Diag(DiagArgs),
    /// Scale a power prediction to another technology node.
    Transfer(TransferArgs),
    /// Rank configurations of a design space under a power budget.
    Dse(DseArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    /// Generator description; built-in defaults when absent.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Relative label noise.
    #[arg(long)]
    noise: Option<f64>,
    /// Noise-free affine laws.
    #[arg(long)]
    exact_affine: bool,
    /// Include the special designs SP1 and SP2.
    #[arg(long)]
    special: bool,
    /// Emit a cross-technology corpus over tsmc28/40/65 instead.
    #[arg(long, conflicts_with_all = ["spec", "exact_affine", "special"])]
    multitech: bool,
}

#[derive(Args, Debug, Clone, Default)]
struct BoostArgs {
    #[arg(long)]
    n_trees: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    l2_leaf_reg: Option<f64>,
    #[arg(long)]
    min_samples_leaf: Option<usize>,
    /// Feed raw event counts instead of per-cycle rates.
    #[arg(long)]
    raw_events: bool,
    /// Resource settings (reserve-station table, default biases).
    #[arg(long)]
    model_config: Option<PathBuf>,
    /// Area regressors learn area / F_res.
    #[arg(long)]
    area_resource_factor: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TrainKind {
    Panda,
    GlobalMl,
    ComponentMl,
    Analytical,
    Area,
    Perf,
    Transfer,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum EvalKind {
    Panda,
    GlobalMl,
    ComponentMl,
    Analytical,
    Area,
    Perf,
    Energy,
}

impl From<EvalKind> for ModelKind {
    fn from(k: EvalKind) -> Self {
        match k {
            EvalKind::Panda => ModelKind::Panda,
            EvalKind::GlobalMl => ModelKind::GlobalMl,
            EvalKind::ComponentMl => ModelKind::ComponentMl,
            EvalKind::Analytical => ModelKind::Analytical,
            EvalKind::Area => ModelKind::Area,
            EvalKind::Perf => ModelKind::Perf,
            EvalKind::Energy => ModelKind::Energy,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Protocol {
    KnownN,
    UnknownDomain,
    Special,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long, value_enum)]
    kind: TrainKind,
    /// Dataset (or transfer corpus for --kind transfer).
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Restrict training to these configuration ids.
    #[arg(long, value_delimiter = ',')]
    configs: Vec<String>,
    #[command(flatten)]
    boost: BoostArgs,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Cycle calibrator; with a PANDA power model adds cycles and energy columns.
    #[arg(long)]
    perf_model: Option<PathBuf>,
    /// Prediction CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-component breakdown CSV (PANDA and area models).
    #[arg(long)]
    breakdown: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, value_enum)]
    protocol: Protocol,
    #[arg(long, value_enum, default_value = "panda")]
    kind: EvalKind,
    #[arg(long)]
    data: PathBuf,
    /// Training configurations per fold for known-n.
    #[arg(long, required_if_eq("protocol", "known-n"))]
    n: Option<usize>,
    /// Full JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-configuration metrics CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    boost: BoostArgs,
}

#[derive(Args, Debug)]
struct DiagArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Components to analyse; all thirteen when absent.
    #[arg(long, value_delimiter = ',')]
    component: Vec<String>,
    #[arg(long)]
    model_config: Option<PathBuf>,
    /// Fit the biases on the dataset before computing F_res.
    #[arg(long)]
    fit: bool,
}

#[derive(Args, Debug)]
struct TransferArgs {
    #[arg(long)]
    model: PathBuf,
    /// tsmc28, tsmc40, tsmc65 or NAME:NM:VOLTS.
    #[arg(long, value_parser = parse_node)]
    source: Option<TechnologyNode>,
    #[arg(long, value_parser = parse_node)]
    target: Option<TechnologyNode>,
    /// Source-node power in watts.
    #[arg(long, requires_all = ["source", "target"], conflicts_with = "data")]
    power: Option<f64>,
    /// Transfer corpus to predict every pair of.
    #[arg(long, required_unless_present = "power")]
    data: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DseArgs {
    #[arg(long)]
    power_model: PathBuf,
    #[arg(long)]
    perf_model: PathBuf,
    /// Design-space JSON; the built-in example space when absent.
    #[arg(long)]
    space: Option<PathBuf>,
    /// Take event vectors from the nearest design in this dataset instead of the synthetic generator.
    #[arg(long)]
    events_data: Option<PathBuf>,
    /// Power budget in watts.
    #[arg(long)]
    constraint: f64,
    #[arg(long, default_value_t = 0.05)]
    tolerance: f64,
    #[arg(long, default_value_t = 10)]
    top_k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Panda(PandaError),
}

impl From<PandaError> for CliError {
    fn from(e: PandaError) -> Self {
        CliError::Panda(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn parse_node(s: &str) -> Result<TechnologyNode, String> {
    match s {
        "tsmc28" => Ok(TechnologyNode::tsmc28()),
        "tsmc40" => Ok(TechnologyNode::tsmc40()),
        "tsmc65" => Ok(TechnologyNode::tsmc65()),
        _ => {
            let parts: Vec<&str> = s.split(':').collect();
            let [name, nm, v] = parts[..] else {
                return Err(format!("expected a known node or NAME:NM:VOLTS, got {s:?}"));
            };
            let nm: f64 = nm.parse().map_err(|e| format!("feature size: {e}"))?;
            let v: f64 = v.parse().map_err(|e| format!("voltage: {e}"))?;
            TechnologyNode::new(name, nm, v).map_err(|e| e.to_string())
        }
    }
}

fn require_file(p: &Path) -> CliResult<()> {
    if p.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("input file {} does not exist", p.display())))
    }
}

fn require_parent(p: &Path) -> CliResult<()> {
    match p.parent() {
        Some(d) if !d.as_os_str().is_empty() && !d.is_dir() => {
            Err(CliError::Usage(format!("output directory {} does not exist", d.display())))
        }
        _ => Ok(()),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| {
            CliError::Panda(PandaError::Io {
                path: p.to_path_buf(),
                source: e,
            })
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_text(p: &Path) -> CliResult<String> {
    fs::read_to_string(p).map_err(|e| {
        CliError::Panda(PandaError::Io {
            path: p.to_path_buf(),
            source: e,
        })
    })
}

fn format_tag(text: &str) -> CliResult<String> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| PandaError::CorruptPayload(format!("model file is not JSON: {e}")))?;
    v.get("format")
        .and_then(|f| f.as_str())
        .map(str::to_string)
        .ok_or_else(|| PandaError::CorruptPayload("model file has no format tag".into()).into())
}

impl BoostArgs {
    fn train_options(&self) -> CliResult<TrainOptions> {
        let d = TrainOptions::default();
        Ok(TrainOptions::new(
            self.n_trees.unwrap_or(d.n_trees()),
            self.max_depth.unwrap_or(d.max_depth()),
            self.learning_rate.unwrap_or(d.learning_rate()),
            self.l2_leaf_reg.unwrap_or(d.l2_leaf_reg()),
            self.min_samples_leaf.unwrap_or(d.min_samples_leaf()),
        )?)
    }

    fn panda_options(&self) -> CliResult<PandaOptions> {
        Ok(PandaOptions {
            train: self.train_options()?,
            normalize_events: !self.raw_events,
        })
    }

    fn resource_defaults(&self) -> CliResult<ResourceParams> {
        match &self.model_config {
            Some(p) => Ok(ModelConfig::load(p)?.defaults()?),
            None => Ok(ResourceParams::default()),
        }
    }

    fn eval_options(&self) -> CliResult<EvalOptions> {
        Ok(EvalOptions {
            panda: self.panda_options()?,
            resource_defaults: self.resource_defaults()?,
            area_resource_factor: self.area_resource_factor,
        })
    }

    fn check_paths(&self) -> CliResult<()> {
        self.model_config.as_deref().map_or(Ok(()), require_file)
    }
}

fn cmd_synth(a: &SynthArgs, seed: u64) -> CliResult<()> {
    if let Some(p) = &a.spec {
        require_file(p)?;
    }
    require_parent(&a.out)?;
    if a.multitech {
        let mut spec = MultiTechSpec::default_for(seed);
        if let Some(n) = a.noise {
            spec.noise_rel = n;
        }
        let nodes = [TechnologyNode::tsmc28(), TechnologyNode::tsmc40(), TechnologyNode::tsmc65()];
        let corpus = generate_multitech(&spec, &nodes)?;
        write_out(Some(&a.out), &transfer_samples_to_jsonl(&corpus))?;
        info!("wrote {} transfer pairs", corpus.len());
        return Ok(());
    }
    let mut spec = match &a.spec {
        Some(p) => serde_json::from_str::<SynthSpec>(&read_text(p)?).map_err(|e| {
            CliError::Panda(PandaError::Parse {
                line: e.line(),
                message: e.to_string(),
            })
        })?,
        None => SynthSpec::default_for(seed),
    };
    spec.seed = seed;
    if a.exact_affine {
        spec = spec.exact_affine();
    }
    if let Some(n) = a.noise {
        spec.noise_rel = n;
    }
    if a.special {
        spec.configs = builtin_configurations();
    }
    let ds = generate(&spec)?;
    write_dataset(&a.out, &ds)?;
    info!("wrote {} samples", ds.len());
    Ok(())
}

fn load_subset(path: &Path, configs: &[String]) -> CliResult<Dataset> {
    let ds = load_dataset(path)?;
    if configs.is_empty() {
        return Ok(ds);
    }
    let known = ds.config_ids();
    if let Some(bad) = configs.iter().find(|c| !known.contains(c)) {
        return Err(CliError::Usage(format!("configuration {bad} is not in the dataset")));
    }
    Ok(ds.subset(configs))
}

fn cmd_train(a: &TrainArgs) -> CliResult<()> {
    require_file(&a.data)?;
    require_parent(&a.out)?;
    a.boost.check_paths()?;
    let b = &a.boost;
    if a.kind == TrainKind::Transfer {
        let corpus = parse_transfer_samples(&read_text(&a.data)?)?;
        train_transfer(&corpus, &b.train_options()?)?.save(&a.out)?;
        return Ok(());
    }
    let ds = load_subset(&a.data, &a.configs)?;
    let defaults = b.resource_defaults()?;
    match a.kind {
        TrainKind::Panda => train_panda(&ds, b.panda_options()?, &defaults)?.save(&a.out)?,
        TrainKind::GlobalMl => train_global_ml(&ds, b.panda_options()?)?.save(&a.out)?,
        TrainKind::ComponentMl => train_component_ml(&ds, b.panda_options()?)?.save(&a.out)?,
        TrainKind::Analytical => train_analytical(&ds, &defaults)?.save(&a.out)?,
        TrainKind::Area => train_area(&ds, &b.train_options()?, b.area_resource_factor, &defaults)?.save(&a.out)?,
        TrainKind::Perf => train_perf(&ds, &b.train_options()?)?.save(&a.out)?,
        TrainKind::Transfer => unreachable!("handled above"),
    }
    info!("trained {:?} on {} samples", a.kind, ds.len());
    Ok(())
}

fn breakdown_header() -> String {
    let mut h = String::from("config_id,workload");
    for c in ComponentId::ALL {
        h.push(',');
        h.push_str(c.name());
    }
    h.push('\n');
    h
}

fn cmd_predict(a: &PredictArgs) -> CliResult<()> {
    require_file(&a.model)?;
    require_file(&a.data)?;
    if let Some(p) = &a.perf_model {
        require_file(p)?;
    }
    for p in [&a.out, &a.breakdown].into_iter().flatten() {
        require_parent(p)?;
    }
    let text = read_text(&a.model)?;
    let tag = format_tag(&text)?;
    let ds = load_dataset(&a.data)?;
    let bytes = text.as_bytes();
    let mut out = String::new();
    let mut breakdown = breakdown_header();

    let per_sample = |header: &str, f: &dyn Fn(&panda::dataset::Sample) -> panda::error::Result<f64>| -> CliResult<String> {
        let mut out = format!("config_id,workload,{header}\n");
        for s in &ds.samples {
            writeln!(out, "{},{},{}", s.config.id, s.workload(), f(s)?).expect("string write");
        }
        Ok(out)
    };

    if tag == power_model::FORMAT_TAG {
        let pm = PandaPowerModel::from_json(bytes)?;
        let cal = match &a.perf_model {
            Some(p) => Some(PerfCalibrator::load(p)?),
            None => None,
        };
        out.push_str(if cal.is_some() {
            "config_id,workload,power_w,cycles,energy_j\n"
        } else {
            "config_id,workload,power_w\n"
        });
        for s in &ds.samples {
            let (p, parts) = predict_total_power(&pm, &s.config, &s.events)?;
            write!(out, "{},{},{p}", s.config.id, s.workload()).expect("string write");
            if let Some(cal) = &cal {
                let c = predict_cycles(cal, &s.config, &s.events)?;
                write!(out, ",{c},{}", energy(p, c, s.events.frequency_hz)).expect("string write");
            }
            out.push('\n');
            write!(breakdown, "{},{}", s.config.id, s.workload()).expect("string write");
            for v in parts.values() {
                write!(breakdown, ",{v}").expect("string write");
            }
            breakdown.push('\n');
        }
    } else if tag == GLOBAL_TAG {
        let m = GlobalMlModel::from_json(bytes)?;
        out = per_sample("power_w", &|s| predict_global_ml(&m, &s.config, &s.events))?;
    } else if tag == COMPONENT_TAG {
        let m = ComponentMlModel::from_json(bytes)?;
        out = per_sample("power_w", &|s| predict_component_ml(&m, &s.config, &s.events))?;
    } else if tag == ANALYTICAL_TAG {
        let m = AnalyticalLinearModel::from_json(bytes)?;
        out = per_sample("power_w", &|s| predict_analytical(&m, &s.config))?;
    } else if tag == PERF_TAG {
        let m = PerfCalibrator::from_json(bytes)?;
        out = per_sample("cycles", &|s| predict_cycles(&m, &s.config, &s.events))?;
    } else if tag == AREA_TAG {
        let m = AreaModel::from_json(bytes)?;
        out.push_str("config_id,area_um2\n");
        breakdown = breakdown.replacen("config_id,workload", "config_id", 1);
        for c in ds.configs() {
            let (total, parts) = predict_area(&m, &c)?;
            writeln!(out, "{},{total}", c.id).expect("string write");
            breakdown.push_str(&c.id);
            for v in parts.values() {
                write!(breakdown, ",{v}").expect("string write");
            }
            breakdown.push('\n');
        }
    } else if tag == transfer::FORMAT_TAG {
        return Err(CliError::Usage("transfer models are applied with the transfer subcommand".into()));
    } else {
        return Err(PandaError::VersionMismatch {
            expected: "a panda model format".into(),
            found: tag,
        }
        .into());
    }

    if let Some(b) = &a.breakdown {
        if tag != power_model::FORMAT_TAG && tag != AREA_TAG {
            return Err(CliError::Usage("--breakdown needs a PANDA power or area model".into()));
        }
        write_out(Some(b), &breakdown)?;
    }
    write_out(a.out.as_deref(), &out)
}

fn summary(report: &EvalReport, protocol: &str) -> String {
    let r = report.aggregate_r.map_or("NA".to_string(), |r| format!("{r:.6}"));
    format!(
        "model={} protocol={protocol} folds={} configs={} aggregate_mape={:.6} aggregate_r={r}\n",
        report.model_tag,
        report.folds.folds.len(),
        report.per_config.len(),
        report.aggregate_mape
    )
}

fn cmd_eval(a: &EvalArgs) -> CliResult<()> {
    require_file(&a.data)?;
    a.boost.check_paths()?;
    for p in [&a.out, &a.csv].into_iter().flatten() {
        require_parent(p)?;
    }
    let ds = load_dataset(&a.data)?;
    let opts = a.boost.eval_options()?;
    let kind = ModelKind::from(a.kind);
    let (report, name) = match a.protocol {
        Protocol::KnownN => {
            let n = a.n.expect("clap enforces --n");
            let ids: Vec<String> = ds.config_ids().into_iter().filter(|id| id.starts_with('C')).collect();
            (run_protocol(&ds, &split_known_n(&ids, n)?, kind, &opts)?, "known-n")
        }
        Protocol::UnknownDomain => {
            let configs: Vec<_> = ds.configs().into_iter().filter(|c| c.id.starts_with('C')).collect();
            (run_protocol(&ds, &split_unknown_domain(&configs)?, kind, &opts)?, "unknown-domain")
        }
        Protocol::Special => (run_special_case(&ds, kind, &opts)?, "special"),
    };
    if let Some(p) = &a.out {
        write_out(Some(p), &report.to_json())?;
    }
    if let Some(p) = &a.csv {
        write_out(Some(p), &report.to_csv())?;
    }
    print!("{}", summary(&report, name));
    Ok(())
}

fn cmd_diag(a: &DiagArgs) -> CliResult<()> {
    require_file(&a.data)?;
    if let Some(p) = &a.model_config {
        require_file(p)?;
    }
    if !a.out_dir.is_dir() {
        return Err(CliError::Usage(format!("output directory {} does not exist", a.out_dir.display())));
    }
    let components = if a.component.is_empty() {
        ComponentId::ALL.to_vec()
    } else {
        a.component
            .iter()
            .map(|c| c.parse::<ComponentId>().map_err(|e| CliError::Usage(e.to_string())))
            .collect::<CliResult<Vec<_>>>()?
    };
    let ds = load_dataset(&a.data)?;
    let defaults = match &a.model_config {
        Some(p) => ModelConfig::load(p)?.defaults()?,
        None => ResourceParams::default(),
    };
    let params = if a.fit { fit_resource_params(&ds, &defaults)? } else { defaults };
    for c in components {
        let d = resource_diagnostics(&ds, c, &params)?;
        d.write_csv(&a.out_dir)?;
        println!(
            "component={} groups={} power_spread={:.6} ratio_spread={:.6}",
            c.name(),
            d.groups.len(),
            d.power_spread,
            d.ratio_spread
        );
    }
    Ok(())
}

fn cmd_transfer(a: &TransferArgs) -> CliResult<()> {
    require_file(&a.model)?;
    if let Some(p) = &a.data {
        require_file(p)?;
    }
    if let Some(p) = &a.out {
        require_parent(p)?;
    }
    let model = TransferModel::load(&a.model)?;
    if let Some(w) = a.power {
        let (s, t) = (a.source.as_ref().expect("clap"), a.target.as_ref().expect("clap"));
        let text = format!(
            "source,target,source_power_w,cv2_power_w,predicted_power_w\n{},{},{w},{},{}\n",
            s.name,
            t.name,
            cv2_scale(w, s, t)?,
            predict_transferred_power(&model, w, s, t)?
        );
        return write_out(a.out.as_deref(), &text);
    }
    let corpus = parse_transfer_samples(&read_text(a.data.as_ref().expect("clap"))?)?;
    let mut out = String::from("design_id,source,target,source_power_w,target_power_w,cv2_power_w,predicted_power_w\n");
    for s in corpus.iter().filter(|s| {
        a.source.as_ref().is_none_or(|n| n.name == s.source.name) && a.target.as_ref().is_none_or(|n| n.name == s.target.name)
    }) {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.design_id,
            s.source.name,
            s.target.name,
            s.source_power,
            s.target_power,
            cv2_scale(s.source_power, &s.source, &s.target)?,
            predict_transferred_power(&model, s.source_power, &s.source, &s.target)?
        )
        .expect("string write");
    }
    write_out(a.out.as_deref(), &out)
}

fn cmd_dse(a: &DseArgs, seed: u64) -> CliResult<()> {
    require_file(&a.power_model)?;
    require_file(&a.perf_model)?;
    for p in [&a.space, &a.events_data].into_iter().flatten() {
        require_file(p)?;
    }
    if let Some(p) = &a.out {
        require_parent(p)?;
    }
    let pm = PandaPowerModel::load(&a.power_model)?;
    let cal = PerfCalibrator::load(&a.perf_model)?;
    let space = match &a.space {
        Some(p) => DesignSpace::load(p)?,
        None => example_space(),
    };
    let synth;
    let scaled;
    let provider: &dyn EventsProvider = match &a.events_data {
        Some(p) => {
            scaled = ScaledRatesProvider::new(load_dataset(p)?)?;
            &scaled
        }
        None => {
            synth = SynthSpec::default_for(seed);
            &synth
        }
    };
    let opts = ExploreOptions {
        constraint: a.constraint,
        tolerance: a.tolerance,
        top_k: a.top_k,
    };
    let result = explore(&space, &pm, &cal, provider, opts)?;
    eprintln!(
        "evaluated={} feasible={} returned={}",
        result.evaluated,
        result.feasible,
        result.candidates.len()
    );
    write_out(a.out.as_deref(), &result.to_csv())
}

fn run(cli: Cli) -> CliResult<()> {
    let seed = cli.seed.unwrap_or(0);
    par::with_threads(cli.jobs, || match &cli.command {
        Command::Synth(a) => cmd_synth(a, seed),
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Diag(a) => cmd_diag(a),
        Command::Transfer(a) => cmd_transfer(a),
        Command::Dse(a) => cmd_dse(a, seed),
    })
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let head: Vec<&str> = msg.lines().take_while(|l| !l.starts_with("Usage:")).collect();
            eprintln!("panda: error[usage]: {}", one_line(head.join(" ").trim_start_matches("error: ")));
            return ExitCode::from(2);
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn })
        .parse_env("PANDA_LOG")
        .init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("panda: error[usage]: {}", one_line(&m));
            ExitCode::from(2)
        }
        Err(CliError::Panda(e)) => {
            let (label, code) = match e.kind() {
                ErrorKind::Usage => ("usage", 2),
                ErrorKind::Data => ("data", 3),
                ErrorKind::Model => ("model", 4),
            };
            eprintln!("panda: error[{label}]: {}", one_line(&e.to_string()));
            ExitCode::from(code)
        }
    }
}
