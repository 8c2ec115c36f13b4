//! Canonical event-counter registry.
//!
//! Names are simulator statistics with dots replaced by underscores. A few
//! short forms are accepted as aliases of their fully qualified counterparts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::component::ComponentId;
use crate::error::{PandaError, Result};

/// How an event relates to execution, used by the synthetic generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// Scales with instruction throughput.
    Activity,
    /// Scales with throughput times a miss probability.
    Miss,
    /// A fraction of elapsed cycles.
    Cycle,
    /// The cycle counter itself.
    Cycles,
}

#[derive(Debug, Clone, Copy)]
pub struct EventDef {
    pub name: &'static str,
    /// `None` for core-wide counters that belong to no single component.
    pub owner: Option<ComponentId>,
    pub kind: EventKind,
}

const fn ev(name: &'static str, owner: ComponentId, kind: EventKind) -> EventDef {
    EventDef {
        name,
        owner: Some(owner),
        kind,
    }
}

use ComponentId as C;
use EventKind::{Activity as A, Cycle as Y, Miss as M};

pub const NUM_CYCLES: &str = "numCycles";

pub const REGISTRY: &[EventDef] = &[
    ev("BTBLookups", C::BP, A),
    ev("branchPred_condPredicted", C::BP, A),
    ev("branchPred_condIncorrect", C::BP, M),
    ev("commit_branches", C::BP, A),
    ev("fetch_insts", C::IFU, A),
    ev("fetch_branches", C::IFU, A),
    ev("fetch_cycles", C::IFU, Y),
    ev("numRefs", C::IFU, A),
    ev("numStoreInsts", C::IFU, A),
    ev("numInsts", C::IFU, A),
    ev("decode_runCycles", C::IFU, Y),
    ev("decode_blockedCycles", C::IFU, Y),
    ev("decode_decodedInsts", C::IFU, A),
    ev("numBranches", C::IFU, A),
    ev("intInstQueueReads", C::IFU, A),
    ev("intInstQueueWrites", C::IFU, A),
    ev("intInstQueueWakeupAccesses", C::IFU, A),
    ev("fpInstQueueReads", C::IFU, A),
    ev("fpInstQueueWrites", C::IFU, A),
    ev("fpInstQueueWakeupAccesses", C::IFU, A),
    ev("itb_accesses", C::ITLB, A),
    ev("itb_misses", C::ITLB, M),
    ev("icache_overallAccesses", C::ICache, A),
    ev("icache_overallMisses", C::ICache, M),
    ev("icache_ReadReq_mshrHits", C::ICache, M),
    ev("icache_ReadReq_mshrMisses", C::ICache, M),
    ev("icache_tagAccesses", C::ICache, A),
    ev("intLookups", C::RNU, A),
    ev("renamedOperands", C::RNU, A),
    ev("fpLookups", C::RNU, A),
    ev("renamedInsts", C::RNU, A),
    ev("runCycles", C::RNU, Y),
    ev("blockCycles", C::RNU, Y),
    ev("committedMaps", C::RNU, A),
    ev("rob_reads", C::ROB, A),
    ev("rob_writes", C::ROB, A),
    ev("IssuedMemRead", C::ISU, A),
    ev("IssuedMemWrite", C::ISU, A),
    ev("IssuedFloatMemRead", C::ISU, A),
    ev("IssuedFloatMemWrite", C::ISU, A),
    ev("IssuedIntAlu", C::ISU, A),
    ev("IssuedIntMult", C::ISU, A),
    ev("IssuedIntDiv", C::ISU, A),
    ev("IssuedFloatMult", C::ISU, A),
    ev("IssuedFloatDiv", C::ISU, A),
    ev("intRegfileReads", C::Regfile, A),
    ev("fpRegfileReads", C::Regfile, A),
    ev("intRegfileWrites", C::Regfile, A),
    ev("fpRegfileWrites", C::Regfile, A),
    ev("functionCalls", C::Regfile, A),
    ev("intAluAccesses", C::FUPool, A),
    ev("fpAluAccesses", C::FUPool, A),
    ev("MemRead", C::LSU, A),
    ev("InstPrefetch", C::LSU, A),
    ev("MemWrite", C::LSU, A),
    ev("dtb_accesses", C::DTLB, A),
    ev("dtb_misses", C::DTLB, M),
    ev("dcache_ReadReq_accesses", C::DCache, A),
    ev("dcache_WriteReq_accesses", C::DCache, A),
    ev("dcache_ReadReq_misses", C::DCache, M),
    ev("dcache_WriteReq_misses", C::DCache, M),
    ev("dcache_overallMisses", C::DCache, M),
    ev("dcache_MshrHits", C::DCache, M),
    ev("dcache_overallMshrMisses", C::DCache, M),
    ev("dcache_tagAccesses", C::DCache, A),
    EventDef {
        name: NUM_CYCLES,
        owner: None,
        kind: EventKind::Cycles,
    },
    EventDef {
        name: "idleCycles",
        owner: None,
        kind: EventKind::Cycle,
    },
];

const ALIASES: &[(&str, &str)] = &[
    ("condPredicted", "branchPred_condPredicted"),
    ("condIncorrect", "branchPred_condIncorrect"),
    ("dcache_MshrMisses", "dcache_overallMshrMisses"),
    ("dcache_overallMshrHits", "dcache_MshrHits"),
];

/// The ten counters the cycle calibrator uses.
pub const PERF_EVENTS: [&str; 10] = [
    "numCycles",
    "idleCycles",
    "branchPred_condPredicted",
    "branchPred_condIncorrect",
    "icache_overallMisses",
    "icache_ReadReq_mshrMisses",
    "dcache_ReadReq_misses",
    "dcache_WriteReq_misses",
    "dcache_overallMisses",
    "dcache_overallMshrMisses",
];

pub fn lookup(name: &str) -> Option<&'static EventDef> {
    REGISTRY.iter().find(|e| e.name == name)
}

/// Maps a possibly dotted or aliased counter name onto its registry name.
pub fn canonical_name(raw: &str) -> Option<&'static str> {
    let dotless = raw.replace('.', "_");
    let target = ALIASES
        .iter()
        .find(|(alias, _)| *alias == dotless)
        .map(|(_, canon)| *canon)
        .unwrap_or(dotless.as_str());
    lookup(target).map(|e| e.name)
}

/// Registry names owned by `component`, in registry order. Other logic sees every counter.
pub fn events_for(component: ComponentId) -> Vec<&'static str> {
    if component == ComponentId::OtherLogic {
        return REGISTRY.iter().map(|e| e.name).collect();
    }
    REGISTRY
        .iter()
        .filter(|e| e.owner == Some(component))
        .map(|e| e.name)
        .collect()
}

pub fn all_event_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|e| e.name).collect()
}

/// Workload event counters for one (design, workload) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventVector {
    pub workload: String,
    pub counts: BTreeMap<String, u64>,
    pub baseline_cycles: u64,
    pub frequency_hz: f64,
}

pub const DEFAULT_FREQUENCY_HZ: f64 = 1e9;

impl EventVector {
    /// Normalizes names and checks the registry and cycle invariants.
    pub fn new(
        workload: impl Into<String>,
        counts: BTreeMap<String, u64>,
        baseline_cycles: u64,
        frequency_hz: f64,
    ) -> Result<Self> {
        let mut canon = BTreeMap::new();
        for (raw, v) in counts {
            let name = canonical_name(&raw)
                .ok_or_else(|| PandaError::Data(format!("unknown event name {raw:?}")))?;
            if canon.insert(name.to_string(), v).is_some() {
                return Err(PandaError::Data(format!("event {name:?} given twice")));
            }
        }
        let ev = EventVector {
            workload: workload.into(),
            counts: canon,
            baseline_cycles,
            frequency_hz,
        };
        ev.validate()?;
        Ok(ev)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.counts.keys().find(|k| lookup(k).is_none()) {
            return Err(PandaError::Data(format!("unknown event name {bad:?}")));
        }
        match self.counts.get(NUM_CYCLES) {
            Some(&n) if n == self.baseline_cycles => {}
            Some(&n) => {
                return Err(PandaError::Data(format!(
                    "numCycles {n} differs from baseline_cycles {}",
                    self.baseline_cycles
                )))
            }
            None => return Err(PandaError::Data("events lack numCycles".into())),
        }
        if !(self.frequency_hz.is_finite() && self.frequency_hz > 0.0) {
            return Err(PandaError::Data(format!(
                "frequency_hz must be positive, got {}",
                self.frequency_hz
            )));
        }
        Ok(())
    }

    pub fn count(&self, name: &str) -> Option<u64> {
        self.counts.get(name).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn registry_names_unique_and_cover_components() {
        let names: HashSet<_> = REGISTRY.iter().map(|e| e.name).collect();
        assert_eq!(names.len(), REGISTRY.len());
        assert_eq!(REGISTRY.len(), 67);
        for c in ComponentId::ALL {
            assert!(!events_for(c).is_empty(), "{c} has no events");
        }
        assert_eq!(events_for(ComponentId::IFU).len(), 16);
        assert_eq!(events_for(ComponentId::ISU).len(), 9);
        assert_eq!(events_for(ComponentId::DCache).len(), 8);
        assert_eq!(events_for(ComponentId::OtherLogic).len(), REGISTRY.len());
        for p in PERF_EVENTS {
            assert!(lookup(p).is_some(), "{p}");
        }
    }

    #[test]
    fn dotted_and_alias_names_normalize() {
        assert_eq!(canonical_name("icache.overallAccesses"), Some("icache_overallAccesses"));
        assert_eq!(canonical_name("condPredicted"), Some("branchPred_condPredicted"));
        assert_eq!(canonical_name("dcache.MshrMisses"), Some("dcache_overallMshrMisses"));
        assert_eq!(canonical_name("bogusCounter"), None);
    }

    #[test]
    fn event_vector_checks() {
        let mut counts = BTreeMap::new();
        counts.insert("numCycles".to_string(), 100);
        counts.insert("rob.reads".to_string(), 7);
        let ev = EventVector::new("w", counts.clone(), 100, DEFAULT_FREQUENCY_HZ).unwrap();
        assert_eq!(ev.count("rob_reads"), Some(7));

        assert!(EventVector::new("w", counts.clone(), 99, DEFAULT_FREQUENCY_HZ).is_err());
        counts.insert("bogusCounter".into(), 1);
        let err = EventVector::new("w", counts, 100, DEFAULT_FREQUENCY_HZ).unwrap_err();
        assert!(err.to_string().contains("bogusCounter"));
    }
}
