//! Built-in workload profiles.
//!
//! Each profile is described by a handful of traits (branch and memory mix,
//! miss propensity, available ILP) from which a per-instruction rate range
//! is derived for every registry event.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::events::{EventDef, EventKind, REGISTRY};
use crate::dataset::ComponentId;

/// One synthetic workload: instruction count, intrinsic ILP and event rate ranges.
///
/// For `Activity` and `Miss` events a rate is a count per committed
/// instruction; for cycle-fraction events it is a share of elapsed cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadProfile {
    pub name: String,
    pub instructions: u64,
    pub ilp: f64,
    pub rates: BTreeMap<String, (f64, f64)>,
}

struct Traits {
    branch: f64,
    mem: f64,
    fp: f64,
    store: f64,
    imiss: f64,
    dmiss: f64,
}

fn base_rate(def: &EventDef, t: &Traits) -> f64 {
    let name = def.name;
    let is_fp = name.contains("fp") || name.contains("Float");
    let load = t.mem * (1.0 - t.store);
    let store = t.mem * t.store;
    match (def.owner, def.kind) {
        (_, EventKind::Cycles) => 1.0,
        (None, EventKind::Cycle) => 0.2,
        (_, EventKind::Cycle) if name.contains("block") => 0.1,
        (_, EventKind::Cycle) => 0.85,
        (Some(ComponentId::BP), EventKind::Miss) => t.branch * 0.08,
        (Some(ComponentId::BP), _) => t.branch,
        (Some(ComponentId::IFU), _) => {
            if is_fp {
                t.fp
            } else if name.contains("Store") {
                store
            } else if name == "numRefs" {
                t.mem
            } else if name.contains("ranch") {
                t.branch
            } else {
                1.0
            }
        }
        (Some(ComponentId::ITLB), EventKind::Miss) => t.imiss * 0.1,
        (Some(ComponentId::ICache), EventKind::Miss) => t.imiss * if name.contains("Hits") { 0.3 } else { 1.0 },
        (Some(ComponentId::ITLB | ComponentId::ICache), _) => 0.25,
        (Some(ComponentId::RNU), _) => {
            if is_fp {
                t.fp * 2.0
            } else {
                1.5
            }
        }
        (Some(ComponentId::ISU), _) => match name {
            "IssuedMemRead" => load,
            "IssuedMemWrite" => store,
            "IssuedFloatMemRead" => load * t.fp,
            "IssuedFloatMemWrite" => store * t.fp,
            "IssuedIntMult" => 0.02,
            "IssuedIntDiv" => 0.005,
            _ if is_fp => t.fp * 0.5,
            _ => (1.0 - t.mem - t.branch - t.fp).max(0.1),
        },
        (Some(ComponentId::Regfile), _) => {
            if name == "functionCalls" {
                t.branch * 0.1
            } else if is_fp {
                t.fp * 2.0
            } else {
                2.0
            }
        }
        (Some(ComponentId::FUPool), _) => {
            if is_fp {
                t.fp
            } else {
                0.6
            }
        }
        (Some(ComponentId::LSU), _) => match name {
            "MemRead" => load,
            "MemWrite" => store,
            _ => 0.05,
        },
        (Some(ComponentId::DTLB), EventKind::Miss) => t.mem * t.dmiss * 0.1,
        (Some(ComponentId::DTLB), _) => t.mem,
        (Some(ComponentId::DCache), EventKind::Miss) => {
            let base = t.mem * t.dmiss;
            if name.contains("ReadReq") {
                base * (1.0 - t.store)
            } else if name.contains("WriteReq") {
                base * t.store
            } else if name.contains("Hits") {
                base * 0.3
            } else {
                base
            }
        }
        (Some(ComponentId::DCache), _) => {
            if name.contains("ReadReq") {
                load
            } else if name.contains("WriteReq") {
                store
            } else {
                t.mem
            }
        }
        _ => 1.0,
    }
}

fn profile(name: &str, instructions: u64, ilp: f64, t: Traits) -> WorkloadProfile {
    let rates = REGISTRY
        .iter()
        .map(|def| {
            let r = base_rate(def, &t);
            (def.name.to_string(), (0.9 * r, 1.1 * r))
        })
        .collect();
    WorkloadProfile {
        name: name.into(),
        instructions,
        ilp,
        rates,
    }
}

/// Eight profiles named after common embedded benchmarks.
pub fn default_profiles() -> Vec<WorkloadProfile> {
    #[rustfmt::skip]
    let table: [(&str, u64, f64, [f64; 6]); 8] = [
        //              instr      ilp   branch mem   fp    store imiss  dmiss
        ("dhrystone", 2_000_000, 2.2, [0.15, 0.30, 0.00, 0.35, 0.005, 0.01]),
        ("median",    1_500_000, 1.8, [0.18, 0.25, 0.00, 0.30, 0.002, 0.03]),
        ("multiply",  1_800_000, 2.8, [0.08, 0.15, 0.00, 0.20, 0.001, 0.01]),
        ("qsort",     2_500_000, 1.6, [0.20, 0.30, 0.00, 0.40, 0.003, 0.05]),
        ("rsort",     2_200_000, 2.0, [0.10, 0.35, 0.00, 0.45, 0.002, 0.08]),
        ("towers",    1_200_000, 1.9, [0.14, 0.32, 0.00, 0.45, 0.002, 0.02]),
        ("spmv",      3_000_000, 1.5, [0.10, 0.40, 0.30, 0.20, 0.001, 0.12]),
        ("vvadd",     1_000_000, 2.5, [0.06, 0.45, 0.25, 0.33, 0.001, 0.06]),
    ];
    table
        .iter()
        .map(|&(name, instr, ilp, [branch, mem, fp, store, imiss, dmiss])| {
            profile(
                name,
                instr,
                ilp,
                Traits {
                    branch,
                    mem,
                    fp,
                    store,
                    imiss,
                    dmiss,
                },
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_profile_covers_the_registry() {
        let profiles = default_profiles();
        assert_eq!(profiles.len(), 8);
        for p in &profiles {
            assert_eq!(p.rates.len(), REGISTRY.len());
            for (name, (lo, hi)) in &p.rates {
                assert!(*lo >= 0.0 && lo <= hi, "{}: {name}", p.name);
            }
            assert!(p.ilp > 0.0 && p.instructions > 0);
        }
    }

    #[test]
    fn fp_free_workloads_have_no_fp_activity() {
        let p = &default_profiles()[0];
        assert_eq!(p.rates["fpAluAccesses"], (0.0, 0.0));
        let spmv = default_profiles().into_iter().find(|p| p.name == "spmv").unwrap();
        assert!(spmv.rates["fpAluAccesses"].0 > 0.0);
    }
}
