//! Cross-technology power transfer.
//!
//! One regressor, trained on small designs implemented at several nodes,
//! predicts the target/source power ratio for any pair of nodes.

use std::fs;
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::dataset::TechnologyNode;
use crate::error::{PandaError, Result};
use crate::regressor::{self, decode_tagged, BoostedEnsemble, FeatureMatrix, FeatureRow, TrainOptions};

pub const FORMAT_TAG: &str = "panda-xfer-1";

pub const FEATURES: [&str; 4] = ["source_power", "feature_size_ratio", "voltage_ratio", "cv2_scaled_power"];

/// One small design measured at two nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferSample {
    pub design_id: String,
    pub source: TechnologyNode,
    pub target: TechnologyNode,
    pub source_power: f64,
    pub target_power: f64,
}

impl TransferSample {
    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.target.validate()?;
        if self.source == self.target {
            return Err(PandaError::Data(format!("{}: source and target node are identical", self.design_id)));
        }
        if !(self.source_power > 0.0 && self.target_power > 0.0) {
            return Err(PandaError::Data(format!("{}: powers must be positive", self.design_id)));
        }
        Ok(())
    }
}

/// Dynamic-power scaling `P · (L_t / L_s) · (V_t / V_s)²`.
pub fn cv2_scale(power: f64, source: &TechnologyNode, target: &TechnologyNode) -> Result<f64> {
    source.validate()?;
    target.validate()?;
    if !(power.is_finite() && power > 0.0) {
        return Err(PandaError::InvalidArgument(format!("power must be positive, got {power}")));
    }
    let v = target.voltage / source.voltage;
    Ok(power * (target.feature_size / source.feature_size) * (v * v))
}

pub fn build_transfer_features(source_power: f64, source: &TechnologyNode, target: &TechnologyNode) -> Result<FeatureRow> {
    let scaled = cv2_scale(source_power, source, target)?;
    let mut row = FeatureRow::default();
    row.push(FEATURES[0], source_power);
    row.push(FEATURES[1], target.feature_size / source.feature_size);
    row.push(FEATURES[2], target.voltage / source.voltage);
    row.push(FEATURES[3], scaled);
    Ok(row)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferModel {
    pub ensemble: BoostedEnsemble,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireTransfer {
    format: String,
    ensemble: BoostedEnsemble,
}

impl TransferModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&WireTransfer {
            format: FORMAT_TAG.into(),
            ensemble: self.ensemble.clone(),
        })
        .expect("transfer model serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let w: WireTransfer = decode_tagged(bytes, FORMAT_TAG)?;
        if w.ensemble.feature_names != FEATURES {
            return Err(PandaError::CorruptPayload("transfer model has unexpected features".into()));
        }
        Ok(TransferModel { ensemble: w.ensemble })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| PandaError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&fs::read(path).map_err(|e| PandaError::io(path, e))?)
    }
}

pub fn train_transfer(samples: &[TransferSample], opts: &TrainOptions) -> Result<TransferModel> {
    if samples.len() < 2 {
        return Err(PandaError::EmptyDataset("transfer training needs at least two samples".into()));
    }
    let mut pairs = Vec::new();
    let mut x = FeatureMatrix::new(FEATURES.iter().map(|s| s.to_string()).collect());
    let mut y = Vec::with_capacity(samples.len());
    for s in samples {
        s.validate()?;
        let pair = (s.source.name.clone(), s.target.name.clone());
        if !pairs.contains(&pair) {
            pairs.push(pair);
        }
        x.push_row(&build_transfer_features(s.source_power, &s.source, &s.target)?.values)?;
        y.push(s.target_power / s.source_power);
    }
    if pairs.len() < 2 {
        warn!("transfer corpus covers a single node pair; the model cannot generalize across pairs");
    }
    Ok(TransferModel {
        ensemble: regressor::fit(&x, &y, opts)?,
    })
}

/// Scales a source-node prediction to `target`, floored at zero.
pub fn predict_transferred_power(
    model: &TransferModel,
    source_prediction: f64,
    source: &TechnologyNode,
    target: &TechnologyNode,
) -> Result<f64> {
    let row = build_transfer_features(source_prediction, source, target)?;
    Ok((source_prediction * model.ensemble.predict(&row)?).max(0.0))
}

/// Reads a JSON-lines transfer corpus; blank lines are skipped.
pub fn parse_transfer_samples(text: &str) -> Result<Vec<TransferSample>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let s: TransferSample = serde_json::from_str(line).map_err(|e| PandaError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        s.validate()?;
        out.push(s);
    }
    Ok(out)
}

pub fn transfer_samples_to_jsonl(samples: &[TransferSample]) -> String {
    samples
        .iter()
        .map(|s| serde_json::to_string(s).expect("sample serializes") + "\n")
        .collect()
}
