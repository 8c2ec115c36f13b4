use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::PandaError;

/// One of the thirteen individually modeled blocks of the core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ComponentId {
    BP,
    IFU,
    ITLB,
    ICache,
    RNU,
    ROB,
    ISU,
    Regfile,
    FUPool,
    LSU,
    DTLB,
    DCache,
    OtherLogic,
}

/// Coarse pipeline region a component belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CpuPart {
    Frontend,
    Execution,
    MemAccess,
    OtherLogic,
}

impl ComponentId {
    pub const COUNT: usize = 13;

    pub const ALL: [ComponentId; 13] = [
        ComponentId::BP,
        ComponentId::IFU,
        ComponentId::ITLB,
        ComponentId::ICache,
        ComponentId::RNU,
        ComponentId::ROB,
        ComponentId::ISU,
        ComponentId::Regfile,
        ComponentId::FUPool,
        ComponentId::LSU,
        ComponentId::DTLB,
        ComponentId::DCache,
        ComponentId::OtherLogic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ComponentId::BP => "BP",
            ComponentId::IFU => "IFU",
            ComponentId::ITLB => "ITLB",
            ComponentId::ICache => "ICache",
            ComponentId::RNU => "RNU",
            ComponentId::ROB => "ROB",
            ComponentId::ISU => "ISU",
            ComponentId::Regfile => "Regfile",
            ComponentId::FUPool => "FUPool",
            ComponentId::LSU => "LSU",
            ComponentId::DTLB => "DTLB",
            ComponentId::DCache => "DCache",
            ComponentId::OtherLogic => "OtherLogic",
        }
    }

    pub fn part(self) -> CpuPart {
        use ComponentId::*;
        match self {
            BP | IFU | ITLB | ICache => CpuPart::Frontend,
            RNU | ROB | ISU | Regfile | FUPool => CpuPart::Execution,
            LSU | DTLB | DCache => CpuPart::MemAccess,
            OtherLogic => CpuPart::OtherLogic,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ComponentId {
    type Err = PandaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        ComponentId::ALL
            .iter()
            .copied()
            .find(|c| c.name().to_ascii_lowercase() == key)
            .ok_or_else(|| PandaError::InvalidArgument(format!("unknown component {s:?}")))
    }
}
