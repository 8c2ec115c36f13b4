use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::DesignConfiguration;
use crate::error::{PandaError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<String>,
    pub test: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub folds: Vec<Fold>,
}

impl SplitPlan {
    /// Checks disjointness and that every id is known.
    pub fn validate<S: AsRef<str>>(&self, known: &[S]) -> Result<()> {
        let known: Vec<&str> = known.iter().map(|s| s.as_ref()).collect();
        for (k, f) in self.folds.iter().enumerate() {
            if let Some(id) = f.train.iter().chain(&f.test).find(|id| !known.contains(&id.as_str())) {
                return Err(PandaError::Data(format!("fold {k} references unknown configuration {id}")));
            }
            if let Some(id) = f.test.iter().find(|id| f.train.contains(id)) {
                return Err(PandaError::Data(format!("fold {k} trains and tests on {id}")));
            }
        }
        Ok(())
    }
}

/// Known-n protocol over the fifteen normal designs.
///
/// Fold `k` tests the cyclic window of `15 - n` designs starting at position
/// `k` and trains on the remaining `n`.
pub fn split_known_n<S: AsRef<str>>(config_ids: &[S], n: usize) -> Result<SplitPlan> {
    const TOTAL: usize = 15;
    if config_ids.len() != TOTAL {
        return Err(PandaError::InvalidArgument(format!(
            "known-n protocol needs exactly {TOTAL} configurations, got {}",
            config_ids.len()
        )));
    }
    if !(1..TOTAL).contains(&n) {
        return Err(PandaError::InvalidArgument(format!("n must be in [1, 14], got {n}")));
    }
    let window = TOTAL - n;
    let folds = (0..TOTAL)
        .map(|k| {
            let test: Vec<String> = (0..window)
                .map(|j| config_ids[(k + j) % TOTAL].as_ref().to_string())
                .collect();
            let train = config_ids
                .iter()
                .map(|s| s.as_ref().to_string())
                .filter(|id| !test.contains(id))
                .collect();
            Fold { train, test }
        })
        .collect();
    Ok(SplitPlan { folds })
}

/// Leave-one-domain-out: one fold per distinct DecodeWidth, ascending.
pub fn split_unknown_domain(configs: &[DesignConfiguration]) -> Result<SplitPlan> {
    let mut domains: BTreeMap<u32, Vec<String>> = BTreeMap::new();
    for c in configs {
        domains.entry(c.decode_width).or_default().push(c.id.clone());
    }
    if domains.len() < 2 {
        return Err(PandaError::InvalidArgument(format!(
            "unknown-domain protocol needs at least 2 DecodeWidth domains, got {}",
            domains.len()
        )));
    }
    let folds = domains
        .keys()
        .map(|held_out| Fold {
            test: domains[held_out].clone(),
            train: domains
                .iter()
                .filter(|(w, _)| *w != held_out)
                .flat_map(|(_, ids)| ids.iter().cloned())
                .collect(),
        })
        .collect();
    Ok(SplitPlan { folds })
}
