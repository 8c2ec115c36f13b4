use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PandaError, Result};

/// Architecture knobs of one out-of-order core design point.
///
/// The load/store queue depths, the memory/FP issue widths and the two cache
/// associativities are separate fields even where the reference designs give
/// them equal values. `DTLBEntry` serves as both the instruction-side and the
/// data-side TLB size.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfiguration {
    pub id: String,
    #[serde(rename = "FetchWidth")]
    pub fetch_width: u32,
    #[serde(rename = "DecodeWidth")]
    pub decode_width: u32,
    #[serde(rename = "FetchBufferEntry")]
    pub fetch_buffer_entry: u32,
    #[serde(rename = "RobEntry")]
    pub rob_entry: u32,
    #[serde(rename = "IntPhyRegister")]
    pub int_phy_register: u32,
    #[serde(rename = "FpPhyRegister")]
    pub fp_phy_register: u32,
    #[serde(rename = "LDQEntry")]
    pub ldq_entry: u32,
    #[serde(rename = "STQEntry")]
    pub stq_entry: u32,
    #[serde(rename = "BranchCount")]
    pub branch_count: u32,
    #[serde(rename = "MemIssueWidth")]
    pub mem_issue_width: u32,
    #[serde(rename = "FpIssueWidth")]
    pub fp_issue_width: u32,
    #[serde(rename = "IntIssueWidth")]
    pub int_issue_width: u32,
    #[serde(rename = "DCacheWay")]
    pub dcache_way: u32,
    #[serde(rename = "ICacheWay")]
    pub icache_way: u32,
    #[serde(rename = "DTLBEntry")]
    pub dtlb_entry: u32,
    #[serde(rename = "DCacheMSHR")]
    pub dcache_mshr: u32,
    #[serde(rename = "ICacheFetchBytes")]
    pub icache_fetch_bytes: u32,
}

/// Names a single field of [`DesignConfiguration`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConfigParam {
    FetchWidth,
    DecodeWidth,
    FetchBufferEntry,
    RobEntry,
    IntPhyRegister,
    FpPhyRegister,
    LDQEntry,
    STQEntry,
    BranchCount,
    MemIssueWidth,
    FpIssueWidth,
    IntIssueWidth,
    DCacheWay,
    ICacheWay,
    DTLBEntry,
    DCacheMSHR,
    ICacheFetchBytes,
}

impl ConfigParam {
    pub const COUNT: usize = 17;

    pub const ALL: [ConfigParam; 17] = [
        ConfigParam::FetchWidth,
        ConfigParam::DecodeWidth,
        ConfigParam::FetchBufferEntry,
        ConfigParam::RobEntry,
        ConfigParam::IntPhyRegister,
        ConfigParam::FpPhyRegister,
        ConfigParam::LDQEntry,
        ConfigParam::STQEntry,
        ConfigParam::BranchCount,
        ConfigParam::MemIssueWidth,
        ConfigParam::FpIssueWidth,
        ConfigParam::IntIssueWidth,
        ConfigParam::DCacheWay,
        ConfigParam::ICacheWay,
        ConfigParam::DTLBEntry,
        ConfigParam::DCacheMSHR,
        ConfigParam::ICacheFetchBytes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConfigParam::FetchWidth => "FetchWidth",
            ConfigParam::DecodeWidth => "DecodeWidth",
            ConfigParam::FetchBufferEntry => "FetchBufferEntry",
            ConfigParam::RobEntry => "RobEntry",
            ConfigParam::IntPhyRegister => "IntPhyRegister",
            ConfigParam::FpPhyRegister => "FpPhyRegister",
            ConfigParam::LDQEntry => "LDQEntry",
            ConfigParam::STQEntry => "STQEntry",
            ConfigParam::BranchCount => "BranchCount",
            ConfigParam::MemIssueWidth => "MemIssueWidth",
            ConfigParam::FpIssueWidth => "FpIssueWidth",
            ConfigParam::IntIssueWidth => "IntIssueWidth",
            ConfigParam::DCacheWay => "DCacheWay",
            ConfigParam::ICacheWay => "ICacheWay",
            ConfigParam::DTLBEntry => "DTLBEntry",
            ConfigParam::DCacheMSHR => "DCacheMSHR",
            ConfigParam::ICacheFetchBytes => "ICacheFetchBytes",
        }
    }
}

impl fmt::Display for ConfigParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConfigParam {
    type Err = PandaError;

    fn from_str(s: &str) -> Result<Self> {
        // Table-style aliases for the shared TLB field.
        let s = match s {
            "ICacheTLBEntry" | "DCacheTLBEntry" => "DTLBEntry",
            other => other,
        };
        ConfigParam::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| PandaError::InvalidArgument(format!("unknown configuration parameter {s:?}")))
    }
}

impl DesignConfiguration {
    /// Builds a configuration from values in [`ConfigParam::ALL`] order.
    pub fn from_values(id: impl Into<String>, v: [u32; ConfigParam::COUNT]) -> Self {
        DesignConfiguration {
            id: id.into(),
            fetch_width: v[0],
            decode_width: v[1],
            fetch_buffer_entry: v[2],
            rob_entry: v[3],
            int_phy_register: v[4],
            fp_phy_register: v[5],
            ldq_entry: v[6],
            stq_entry: v[7],
            branch_count: v[8],
            mem_issue_width: v[9],
            fp_issue_width: v[10],
            int_issue_width: v[11],
            dcache_way: v[12],
            icache_way: v[13],
            dtlb_entry: v[14],
            dcache_mshr: v[15],
            icache_fetch_bytes: v[16],
        }
    }

    pub fn values(&self) -> [u32; ConfigParam::COUNT] {
        ConfigParam::ALL.map(|p| self.get(p))
    }

    pub fn get(&self, p: ConfigParam) -> u32 {
        match p {
            ConfigParam::FetchWidth => self.fetch_width,
            ConfigParam::DecodeWidth => self.decode_width,
            ConfigParam::FetchBufferEntry => self.fetch_buffer_entry,
            ConfigParam::RobEntry => self.rob_entry,
            ConfigParam::IntPhyRegister => self.int_phy_register,
            ConfigParam::FpPhyRegister => self.fp_phy_register,
            ConfigParam::LDQEntry => self.ldq_entry,
            ConfigParam::STQEntry => self.stq_entry,
            ConfigParam::BranchCount => self.branch_count,
            ConfigParam::MemIssueWidth => self.mem_issue_width,
            ConfigParam::FpIssueWidth => self.fp_issue_width,
            ConfigParam::IntIssueWidth => self.int_issue_width,
            ConfigParam::DCacheWay => self.dcache_way,
            ConfigParam::ICacheWay => self.icache_way,
            ConfigParam::DTLBEntry => self.dtlb_entry,
            ConfigParam::DCacheMSHR => self.dcache_mshr,
            ConfigParam::ICacheFetchBytes => self.icache_fetch_bytes,
        }
    }

    pub fn set(&mut self, p: ConfigParam, value: u32) {
        let slot = match p {
            ConfigParam::FetchWidth => &mut self.fetch_width,
            ConfigParam::DecodeWidth => &mut self.decode_width,
            ConfigParam::FetchBufferEntry => &mut self.fetch_buffer_entry,
            ConfigParam::RobEntry => &mut self.rob_entry,
            ConfigParam::IntPhyRegister => &mut self.int_phy_register,
            ConfigParam::FpPhyRegister => &mut self.fp_phy_register,
            ConfigParam::LDQEntry => &mut self.ldq_entry,
            ConfigParam::STQEntry => &mut self.stq_entry,
            ConfigParam::BranchCount => &mut self.branch_count,
            ConfigParam::MemIssueWidth => &mut self.mem_issue_width,
            ConfigParam::FpIssueWidth => &mut self.fp_issue_width,
            ConfigParam::IntIssueWidth => &mut self.int_issue_width,
            ConfigParam::DCacheWay => &mut self.dcache_way,
            ConfigParam::ICacheWay => &mut self.icache_way,
            ConfigParam::DTLBEntry => &mut self.dtlb_entry,
            ConfigParam::DCacheMSHR => &mut self.dcache_mshr,
            ConfigParam::ICacheFetchBytes => &mut self.icache_fetch_bytes,
        };
        *slot = value;
    }

    /// True when the two configurations agree on every parameter (ids ignored).
    pub fn same_parameters(&self, other: &DesignConfiguration) -> bool {
        self.values() == other.values()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = ConfigParam::ALL.iter().find(|p| self.get(**p) == 0) {
            return Err(PandaError::Data(format!(
                "configuration {}: {} must be >= 1",
                self.id, p
            )));
        }
        if self.decode_width > self.fetch_width {
            return Err(PandaError::Data(format!(
                "configuration {}: DecodeWidth {} exceeds FetchWidth {}",
                self.id, self.decode_width, self.fetch_width
            )));
        }
        Ok(())
    }
}

// Columns C1..C15, SP1, SP2; rows in ConfigParam::ALL order with the
// combined rows (LDQ/STQ, MemIssue/FpIssue, DCache/ICache ways) repeated.
const BUILTIN_IDS: [&str; 17] = [
    "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11", "C12", "C13", "C14",
    "C15", "SP1", "SP2",
];

const FETCH_WIDTH: [u32; 17] = [4, 4, 4, 4, 4, 8, 8, 8, 8, 8, 8, 8, 8, 8, 8, 8, 8];
const DECODE_WIDTH: [u32; 17] = [1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4, 5, 5, 5, 1, 5];
const FETCH_BUFFER: [u32; 17] = [5, 8, 16, 8, 16, 24, 18, 24, 30, 24, 32, 40, 30, 35, 40, 10, 40];
const ROB: [u32; 17] = [
    16, 32, 48, 64, 64, 80, 81, 96, 114, 112, 128, 136, 125, 130, 140, 16, 140,
];
const INT_PHY: [u32; 17] = [
    36, 53, 68, 64, 80, 88, 88, 110, 112, 108, 128, 136, 108, 128, 140, 36, 140,
];
const FP_PHY: [u32; 17] = [
    36, 48, 56, 56, 64, 72, 88, 96, 112, 108, 128, 136, 108, 128, 140, 36, 140,
];
const LSQ: [u32; 17] = [4, 8, 16, 12, 16, 20, 16, 24, 32, 24, 32, 36, 24, 32, 36, 4, 36];
const BRANCH: [u32; 17] = [6, 8, 10, 10, 12, 14, 14, 16, 16, 18, 20, 20, 18, 20, 20, 6, 20];
const MEM_FP_ISSUE: [u32; 17] = [1, 1, 1, 1, 1, 1, 1, 1, 2, 1, 2, 2, 2, 2, 2, 1, 2];
const INT_ISSUE: [u32; 17] = [1, 1, 1, 1, 2, 2, 2, 3, 3, 4, 4, 4, 5, 5, 5, 1, 5];
const CACHE_WAY: [u32; 17] = [2, 4, 8, 4, 4, 8, 8, 8, 8, 8, 8, 8, 8, 8, 8, 2, 2];
const DTLB: [u32; 17] = [8, 8, 16, 8, 8, 16, 16, 16, 32, 32, 32, 32, 32, 32, 32, 8, 32];
const MSHR: [u32; 17] = [2, 2, 4, 2, 2, 4, 4, 4, 4, 4, 4, 8, 8, 8, 8, 2, 8];
const FETCH_BYTES: [u32; 17] = [2, 2, 2, 2, 2, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4];

/// The seventeen reference design points: C1..C15 followed by SP1 and SP2.
pub fn builtin_configurations() -> Vec<DesignConfiguration> {
    (0..BUILTIN_IDS.len())
        .map(|i| {
            DesignConfiguration::from_values(
                BUILTIN_IDS[i],
                [
                    FETCH_WIDTH[i],
                    DECODE_WIDTH[i],
                    FETCH_BUFFER[i],
                    ROB[i],
                    INT_PHY[i],
                    FP_PHY[i],
                    LSQ[i],
                    LSQ[i],
                    BRANCH[i],
                    MEM_FP_ISSUE[i],
                    MEM_FP_ISSUE[i],
                    INT_ISSUE[i],
                    CACHE_WAY[i],
                    CACHE_WAY[i],
                    DTLB[i],
                    MSHR[i],
                    FETCH_BYTES[i],
                ],
            )
        })
        .collect()
}

/// C1..C15 only.
pub fn normal_configurations() -> Vec<DesignConfiguration> {
    builtin_configurations().into_iter().take(15).collect()
}

/// Looks up a built-in configuration by id.
pub fn builtin(id: &str) -> Option<DesignConfiguration> {
    builtin_configurations().into_iter().find(|c| c.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_builtins_in_order() {
        let all = builtin_configurations();
        assert_eq!(all.len(), 17);
        let ids: Vec<&str> = all.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, BUILTIN_IDS.to_vec());
        for c in &all {
            c.validate().unwrap();
        }
    }

    #[test]
    fn c1_and_specials() {
        let c1 = builtin("C1").unwrap();
        assert_eq!(c1.decode_width, 1);
        assert_eq!(c1.rob_entry, 16);
        assert_eq!(c1.icache_fetch_bytes, 2);
        assert_eq!((c1.ldq_entry, c1.stq_entry), (4, 4));

        let sp2 = builtin("SP2").unwrap();
        assert_eq!((sp2.dcache_way, sp2.icache_way, sp2.decode_width), (2, 2, 5));
        let sp1 = builtin("SP1").unwrap();
        assert_eq!(sp1.fetch_width, 8);
        assert_eq!(sp1.decode_width, 1);
    }

    #[test]
    fn get_set_roundtrip() {
        let mut c = builtin("C7").unwrap();
        for (i, p) in ConfigParam::ALL.iter().enumerate() {
            c.set(*p, 100 + i as u32);
        }
        let expect: Vec<u32> = (0..17).map(|i| 100 + i).collect();
        assert_eq!(c.values().to_vec(), expect);
    }

    #[test]
    fn validation_rules() {
        let mut c = builtin("C1").unwrap();
        c.decode_width = 5;
        assert!(c.validate().is_err());
        let mut c = builtin("C1").unwrap();
        c.rob_entry = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn tlb_aliases_parse() {
        assert_eq!("ICacheTLBEntry".parse::<ConfigParam>().unwrap(), ConfigParam::DTLBEntry);
        assert_eq!("DCacheTLBEntry".parse::<ConfigParam>().unwrap(), ConfigParam::DTLBEntry);
        assert!("L2Way".parse::<ConfigParam>().is_err());
    }
}
