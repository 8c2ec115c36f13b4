//! Seeded synthetic ground truth.
//!
//! Labels follow known component-structured laws so that every model can be
//! checked against an oracle. Each sample draws from its own random stream
//! keyed by the seed, the configuration parameters and the workload name,
//! which makes the output independent of generation order.

mod multitech;
mod profiles;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use multitech::{generate_multitech, MultiTechSpec};
pub use profiles::{default_profiles, WorkloadProfile};

use crate::dataset::events::{EventKind, REGISTRY};
use crate::dataset::{
    normal_configurations, ComponentId, ComponentMap, Dataset, DesignConfiguration, EventVector, Sample,
    TechnologyNode, DEFAULT_FREQUENCY_HZ,
};
use crate::error::{PandaError, Result};
use crate::par;
use crate::resource::{eval_resource, ResourceParams};

/// `base + resource_coef · F_res^nonlinearity · (1 + activity_coef · rate)`,
/// where `rate` is `activity_event` per cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentLaw {
    pub base: f64,
    pub resource_coef: f64,
    pub activity_coef: f64,
    pub nonlinearity: f64,
    pub activity_event: String,
}

/// `base + resource_coef · F_res^nonlinearity`, in square micrometers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AreaLaw {
    pub base: f64,
    pub resource_coef: f64,
    pub nonlinearity: f64,
}

/// Everything that determines a synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub seed: u64,
    pub configs: Vec<DesignConfiguration>,
    pub workloads: Vec<WorkloadProfile>,
    #[serde(default = "default_noise")]
    pub noise_rel: f64,
    /// Relative per-sample jitter on event rates.
    #[serde(default = "default_jitter")]
    pub event_jitter: f64,
    pub component_laws: BTreeMap<ComponentId, ComponentLaw>,
    pub area_laws: BTreeMap<ComponentId, AreaLaw>,
    /// Resource parameters of the generating process.
    pub true_resource: ResourceParams,
    pub tech: TechnologyNode,
    #[serde(default = "default_frequency")]
    pub frequency_hz: f64,
}

fn default_noise() -> f64 {
    0.05
}
fn default_jitter() -> f64 {
    0.02
}
fn default_frequency() -> f64 {
    DEFAULT_FREQUENCY_HZ
}

fn default_laws() -> BTreeMap<ComponentId, ComponentLaw> {
    use ComponentId as C;
    #[rustfmt::skip]
    let table: [(C, f64, f64, f64, &str); 13] = [
        (C::BP,         5.0e-3,  3.0,  1.0,  "BTBLookups"),
        (C::IFU,        1.07e-2, 0.5,  1.0,  "fetch_insts"),
        (C::ITLB,       1.67e-4, 2.0,  1.0,  "itb_accesses"),
        (C::ICache,     3.75e-3, 2.0,  0.95, "icache_overallAccesses"),
        (C::RNU,        1.07e-2, 0.5,  1.0,  "renamedInsts"),
        (C::ROB,        4.76e-4, 0.5,  1.0,  "rob_writes"),
        (C::ISU,        1.6e-2,  1.0,  1.0,  "IssuedIntAlu"),
        (C::Regfile,    3.57e-4, 0.25, 1.05, "intRegfileReads"),
        (C::FUPool,     4.0e-2,  0.8,  1.0,  "intAluAccesses"),
        (C::LSU,        7.4e-4,  2.5,  1.0,  "MemRead"),
        (C::DTLB,       2.0e-4,  1.5,  1.0,  "dtb_accesses"),
        (C::DCache,     9.2e-3,  2.5,  0.95, "dcache_ReadReq_accesses"),
        (C::OtherLogic, 1.52e-2, 0.5,  1.0,  "numInsts"),
    ];
    table
        .iter()
        .map(|&(c, coef, act, nl, ev)| {
            (
                c,
                ComponentLaw {
                    base: 2e-3,
                    resource_coef: coef,
                    activity_coef: act,
                    nonlinearity: nl,
                    activity_event: ev.into(),
                },
            )
        })
        .collect()
}

fn default_area_laws() -> BTreeMap<ComponentId, AreaLaw> {
    default_laws()
        .into_iter()
        .map(|(c, law)| {
            (
                c,
                AreaLaw {
                    base: 2_000.0,
                    resource_coef: law.resource_coef * 4e6,
                    nonlinearity: 1.0,
                },
            )
        })
        .collect()
}

impl SynthSpec {
    /// C1..C15 under the eight default profiles with 5% label noise.
    pub fn default_for(seed: u64) -> Self {
        SynthSpec {
            seed,
            configs: normal_configurations(),
            workloads: default_profiles(),
            noise_rel: default_noise(),
            event_jitter: default_jitter(),
            component_laws: default_laws(),
            area_laws: default_area_laws(),
            true_resource: ResourceParams::with_biases(8.0, 8.0, 6.0),
            tech: TechnologyNode::tsmc40(),
            frequency_hz: DEFAULT_FREQUENCY_HZ,
        }
    }

    /// Every law purely affine in `F_res` and no randomness in the labels.
    pub fn exact_affine(mut self) -> Self {
        self.noise_rel = 0.0;
        for law in self.component_laws.values_mut() {
            law.activity_coef = 0.0;
            law.nonlinearity = 1.0;
        }
        for law in self.area_laws.values_mut() {
            law.nonlinearity = 1.0;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(PandaError::InvalidArgument(format!("synth spec: {m}")));
        if self.configs.is_empty() || self.workloads.is_empty() {
            return bad("needs at least one configuration and one workload".into());
        }
        for c in &self.configs {
            c.validate()?;
        }
        if !(0.0..1.0).contains(&self.noise_rel) || !(0.0..1.0).contains(&self.event_jitter) {
            return bad("noise_rel and event_jitter must lie in [0, 1)".into());
        }
        for c in ComponentId::ALL {
            let Some(law) = self.component_laws.get(&c) else {
                return bad(format!("no power law for {c}"));
            };
            let positive = law.base >= 0.0 && law.resource_coef > 0.0 && law.activity_coef >= 0.0 && law.nonlinearity > 0.0;
            if !positive {
                return bad(format!("power law for {c} must be positive"));
            }
            if crate::dataset::events::lookup(&law.activity_event).is_none() {
                return bad(format!("{c}: unknown activity event {:?}", law.activity_event));
            }
            let Some(area) = self.area_laws.get(&c) else {
                return bad(format!("no area law for {c}"));
            };
            if !(area.base >= 0.0 && area.resource_coef > 0.0 && area.nonlinearity > 0.0) {
                return bad(format!("area law for {c} must be positive"));
            }
        }
        for w in &self.workloads {
            if w.instructions == 0 || !(w.ilp > 0.0) {
                return bad(format!("workload {} needs positive instructions and ilp", w.name));
            }
            for (name, (lo, hi)) in &w.rates {
                if crate::dataset::events::lookup(name).is_none() {
                    return bad(format!("workload {}: unknown event {name:?}", w.name));
                }
                if !(*lo >= 0.0 && lo <= hi) {
                    return bad(format!("workload {}: bad rate range for {name}", w.name));
                }
            }
        }
        self.true_resource.validate()?;
        self.tech.validate()?;
        if !(self.frequency_hz > 0.0) {
            return bad("frequency must be positive".into());
        }
        Ok(())
    }

    fn profile(&self, workload: &str) -> Result<&WorkloadProfile> {
        self.workloads
            .iter()
            .find(|w| w.name == workload)
            .ok_or_else(|| PandaError::InvalidArgument(format!("unknown workload {workload:?}")))
    }

    /// One noisy labeled run.
    pub fn sample(&self, config: &DesignConfiguration, workload: &str) -> Result<Sample> {
        self.simulate(config, self.profile(workload)?, true)
    }

    /// The same run with label noise switched off. Events are unchanged.
    pub fn oracle_sample(&self, config: &DesignConfiguration, workload: &str) -> Result<Sample> {
        self.simulate(config, self.profile(workload)?, false)
    }

    /// Noise-free total power averaged over the workload suite.
    pub fn true_mean_power(&self, config: &DesignConfiguration) -> Result<f64> {
        let mut sum = 0.0;
        for w in &self.workloads {
            sum += self.simulate(config, w, false)?.total_power;
        }
        Ok(sum / self.workloads.len() as f64)
    }

    /// Noise-free cycle count for every workload, in suite order.
    pub fn true_cycles(&self, config: &DesignConfiguration) -> Result<Vec<f64>> {
        self.workloads
            .iter()
            .map(|w| Ok(self.simulate(config, w, false)?.true_cycles.unwrap_or(1) as f64))
            .collect()
    }

    fn simulate(&self, config: &DesignConfiguration, w: &WorkloadProfile, noisy: bool) -> Result<Sample> {
        // Workload-level rates are shared by every configuration; the jitter is per run.
        let mut wl_rng = keyed_rng(self.seed, "workload", None, Some(&w.name));
        let mut run_rng = keyed_rng(self.seed, "run", Some(config), Some(&w.name));
        let mut noise_rng = keyed_rng(self.seed, "noise", Some(config), Some(&w.name));
        let mut area_rng = keyed_rng(self.seed, "area", Some(config), None);

        let mut rates = BTreeMap::new();
        for def in REGISTRY {
            let (lo, hi) = w.rates.get(def.name).copied().unwrap_or((0.0, 0.0));
            let u: f64 = wl_rng.random();
            let jitter = 1.0 + self.event_jitter * run_rng.random_range(-1.0..=1.0);
            rates.insert(def.name, (lo + (hi - lo) * u) * jitter);
        }

        let c = config;
        let dmiss = rates.get("dcache_overallMisses").copied().unwrap_or(0.0)
            * (2.0 / c.dcache_way as f64).sqrt();
        let mem = rates.get("dtb_accesses").copied().unwrap_or(0.0);
        let width = c.decode_width as f64;
        let ipc = w.ilp * (1.0 - (-width / w.ilp).exp()) * c.rob_entry as f64 / (c.rob_entry as f64 + 24.0)
            / (1.0 + dmiss * 20.0 / (c.dcache_mshr as f64).powf(0.3));
        let true_clean = w.instructions as f64 / ipc;
        let miss_rate = if mem > 0.0 { dmiss / mem } else { 0.0 };
        let ratio = (1.175 + 0.15 * (width - 1.0) / 4.0) * (1.0 + 0.1 * miss_rate.min(1.0));
        let baseline = (true_clean / ratio).round().max(1.0) as u64;
        let cycle_noise = if noisy {
            1.0 + self.noise_rel * noise_rng.random_range(-1.0..=1.0)
        } else {
            1.0
        };
        let true_cycles = (true_clean * cycle_noise).round().max(1.0) as u64;

        let mut counts = BTreeMap::new();
        for def in REGISTRY {
            let r = rates[def.name];
            let v = match def.kind {
                EventKind::Cycles => baseline as f64,
                EventKind::Cycle => r.min(1.0) * baseline as f64,
                EventKind::Activity => r * w.instructions as f64,
                EventKind::Miss => r * w.instructions as f64 * miss_scale(def.name, def.owner, c),
            };
            counts.insert(def.name.to_string(), v.round() as u64);
        }
        let events = EventVector::new(w.name.clone(), counts, baseline, self.frequency_hz)?;

        let mut power = ComponentMap::new();
        let mut area = ComponentMap::new();
        for comp in ComponentId::ALL {
            let law = &self.component_laws[&comp];
            let fres = eval_resource(comp, c, &self.true_resource)?;
            let rate = events.count(&law.activity_event).unwrap_or(0) as f64 / baseline as f64;
            let eps = if noisy {
                self.noise_rel * noise_rng.random_range(-1.0..=1.0)
            } else {
                0.0
            };
            let p = (law.base + law.resource_coef * fres.powf(law.nonlinearity) * (1.0 + law.activity_coef * rate))
                * (1.0 + eps);
            power.insert(comp, p);

            let al = &self.area_laws[&comp];
            let a_eps = if noisy {
                self.noise_rel * area_rng.random_range(-1.0..=1.0)
            } else {
                0.0
            };
            area.insert(comp, (al.base + al.resource_coef * fres.powf(al.nonlinearity)) * (1.0 + a_eps));
        }

        Ok(Sample {
            config: config.clone(),
            tech: self.tech.clone(),
            events,
            total_power: power.values().sum(),
            component_power: Some(power),
            true_cycles: Some(true_cycles),
            component_area: Some(area),
        })
    }
}

/// How a configuration's capacity changes a miss counter relative to the profile rate.
fn miss_scale(name: &str, owner: Option<ComponentId>, c: &DesignConfiguration) -> f64 {
    match owner {
        Some(ComponentId::BP) => (6.0 / c.branch_count as f64).powf(0.3),
        Some(ComponentId::ICache) => {
            (2.0 / c.icache_way as f64).sqrt() * (2.0 / c.icache_fetch_bytes as f64).powf(0.3)
        }
        Some(ComponentId::ITLB | ComponentId::DTLB) => (8.0 / c.dtlb_entry as f64).sqrt(),
        Some(ComponentId::DCache) if name.contains("Mshr") => {
            (2.0 / c.dcache_way as f64).sqrt() * (c.dcache_mshr as f64 / 2.0).powf(0.3)
        }
        Some(ComponentId::DCache) => (2.0 / c.dcache_way as f64).sqrt(),
        _ => 1.0,
    }
}

/// FNV-1a, used only to derive stable per-sample stream keys.
fn fnv1a(bytes: &[u8], mut h: u64) -> u64 {
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn keyed_rng(seed: u64, domain: &str, config: Option<&DesignConfiguration>, workload: Option<&str>) -> ChaCha8Rng {
    let mut h = fnv1a(&seed.to_le_bytes(), 0xcbf2_9ce4_8422_2325);
    h = fnv1a(domain.as_bytes(), h);
    if let Some(c) = config {
        for v in c.values() {
            h = fnv1a(&v.to_le_bytes(), h);
        }
    }
    h = fnv1a(&[0xff], h);
    if let Some(w) = workload {
        h = fnv1a(w.as_bytes(), h);
    }
    ChaCha8Rng::seed_from_u64(h)
}

/// Generates every (configuration, workload) sample in spec order.
pub fn generate(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let pairs: Vec<(&DesignConfiguration, &WorkloadProfile)> = spec
        .configs
        .iter()
        .flat_map(|c| spec.workloads.iter().map(move |w| (c, w)))
        .collect();
    let samples = par::try_map(&pairs, |(c, w)| spec.simulate(c, w, true))?;
    Dataset::new(samples)
}
