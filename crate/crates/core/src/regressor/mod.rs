//! Deterministic gradient-boosted regression trees for squared loss.
//!
//! Every tree is grown by exact greedy search over all midpoints between
//! consecutive distinct feature values. There is no subsampling, so the
//! fitted ensemble is a pure function of the data and the options.

mod tree;

use serde::{Deserialize, Serialize};

pub use tree::{Node, Tree};

use crate::error::{PandaError, Result};

pub const FORMAT_TAG: &str = "panda-gbt-1";

/// Boosting hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrainOptions", into = "RawTrainOptions")]
pub struct TrainOptions {
    n_trees: usize,
    max_depth: usize,
    learning_rate: f64,
    l2_leaf_reg: f64,
    min_samples_leaf: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrainOptions {
    n_trees: usize,
    max_depth: usize,
    learning_rate: f64,
    l2_leaf_reg: f64,
    min_samples_leaf: usize,
}

impl TryFrom<RawTrainOptions> for TrainOptions {
    type Error = PandaError;

    fn try_from(r: RawTrainOptions) -> Result<Self> {
        TrainOptions::new(r.n_trees, r.max_depth, r.learning_rate, r.l2_leaf_reg, r.min_samples_leaf)
    }
}

impl From<TrainOptions> for RawTrainOptions {
    fn from(o: TrainOptions) -> Self {
        RawTrainOptions {
            n_trees: o.n_trees,
            max_depth: o.max_depth,
            learning_rate: o.learning_rate,
            l2_leaf_reg: o.l2_leaf_reg,
            min_samples_leaf: o.min_samples_leaf,
        }
    }
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            n_trees: 100,
            max_depth: 6,
            learning_rate: 0.3,
            l2_leaf_reg: 1.0,
            min_samples_leaf: 1,
        }
    }
}

impl TrainOptions {
    pub fn new(
        n_trees: usize,
        max_depth: usize,
        learning_rate: f64,
        l2_leaf_reg: f64,
        min_samples_leaf: usize,
    ) -> Result<Self> {
        if n_trees == 0 {
            return Err(PandaError::InvalidArgument("n_trees must be positive".into()));
        }
        if max_depth == 0 {
            return Err(PandaError::InvalidArgument("max_depth must be positive".into()));
        }
        if !(learning_rate > 0.0 && learning_rate <= 1.0) {
            return Err(PandaError::InvalidArgument(format!(
                "learning_rate must lie in (0, 1], got {learning_rate}"
            )));
        }
        if !(l2_leaf_reg.is_finite() && l2_leaf_reg >= 0.0) {
            return Err(PandaError::InvalidArgument(format!(
                "l2_leaf_reg must be non-negative, got {l2_leaf_reg}"
            )));
        }
        if min_samples_leaf == 0 {
            return Err(PandaError::InvalidArgument("min_samples_leaf must be positive".into()));
        }
        Ok(TrainOptions {
            n_trees,
            max_depth,
            learning_rate,
            l2_leaf_reg,
            min_samples_leaf,
        })
    }

    pub fn n_trees(&self) -> usize {
        self.n_trees
    }
    pub fn max_depth(&self) -> usize {
        self.max_depth
    }
    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }
    pub fn l2_leaf_reg(&self) -> f64 {
        self.l2_leaf_reg
    }
    pub fn min_samples_leaf(&self) -> usize {
        self.min_samples_leaf
    }

    pub fn with_n_trees(self, n: usize) -> Result<Self> {
        Self::new(n, self.max_depth, self.learning_rate, self.l2_leaf_reg, self.min_samples_leaf)
    }
    pub fn with_max_depth(self, d: usize) -> Result<Self> {
        Self::new(self.n_trees, d, self.learning_rate, self.l2_leaf_reg, self.min_samples_leaf)
    }
    pub fn with_learning_rate(self, lr: f64) -> Result<Self> {
        Self::new(self.n_trees, self.max_depth, lr, self.l2_leaf_reg, self.min_samples_leaf)
    }
    pub fn with_l2_leaf_reg(self, l2: f64) -> Result<Self> {
        Self::new(self.n_trees, self.max_depth, self.learning_rate, l2, self.min_samples_leaf)
    }
    pub fn with_min_samples_leaf(self, m: usize) -> Result<Self> {
        Self::new(self.n_trees, self.max_depth, self.learning_rate, self.l2_leaf_reg, m)
    }
}

/// Dense row-major feature matrix with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    names: Vec<String>,
    data: Vec<f64>,
    rows: usize,
}

impl FeatureMatrix {
    pub fn new(names: Vec<String>) -> Self {
        FeatureMatrix {
            names,
            data: Vec::new(),
            rows: 0,
        }
    }

    pub fn from_rows(names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let mut m = FeatureMatrix::new(names);
        for r in rows {
            m.push_row(r)?;
        }
        Ok(m)
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.names.len() {
            return Err(PandaError::DimensionMismatch(format!(
                "row has {} values for {} columns",
                row.len(),
                self.names.len()
            )));
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn n_rows(&self) -> usize {
        self.rows
    }
    pub fn n_cols(&self) -> usize {
        self.names.len()
    }
    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.n_cols();
        &self.data[i * c..(i + 1) * c]
    }
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n_cols() + col]
    }
}

/// A feature row keyed by name, in a caller-chosen order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureRow {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl FeatureRow {
    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        self.names.push(name.into());
        self.values.push(value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A fitted additive ensemble: `base_score + learning_rate * Σ tree(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WireEnsemble", into = "WireEnsemble")]
pub struct BoostedEnsemble {
    pub base_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
    pub feature_names: Vec<String>,
}

// Field order here is the byte order on disk.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireEnsemble {
    format: String,
    base_score: f64,
    learning_rate: f64,
    feature_names: Vec<String>,
    trees: Vec<Tree>,
}

impl From<BoostedEnsemble> for WireEnsemble {
    fn from(m: BoostedEnsemble) -> Self {
        WireEnsemble {
            format: FORMAT_TAG.to_string(),
            base_score: m.base_score,
            learning_rate: m.learning_rate,
            feature_names: m.feature_names,
            trees: m.trees,
        }
    }
}

impl TryFrom<WireEnsemble> for BoostedEnsemble {
    type Error = PandaError;

    fn try_from(w: WireEnsemble) -> Result<Self> {
        if w.format != FORMAT_TAG {
            return Err(PandaError::VersionMismatch {
                expected: FORMAT_TAG.into(),
                found: w.format,
            });
        }
        let m = BoostedEnsemble {
            base_score: w.base_score,
            learning_rate: w.learning_rate,
            trees: w.trees,
            feature_names: w.feature_names,
        };
        m.check_structure()?;
        Ok(m)
    }
}

impl BoostedEnsemble {
    /// An ensemble with no trees; predicts `base_score` everywhere.
    pub fn constant(base_score: f64, feature_names: Vec<String>) -> Self {
        BoostedEnsemble {
            base_score,
            learning_rate: 1.0,
            trees: Vec::new(),
            feature_names,
        }
    }

    fn check_structure(&self) -> Result<()> {
        if !self.base_score.is_finite() || !self.learning_rate.is_finite() {
            return Err(PandaError::CorruptPayload("non-finite ensemble scalar".into()));
        }
        for (t, tree) in self.trees.iter().enumerate() {
            tree.check(self.feature_names.len())
                .map_err(|m| PandaError::CorruptPayload(format!("tree {t}: {m}")))?;
        }
        Ok(())
    }

    /// Prediction for a row aligned with `feature_names`.
    pub fn predict_values(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.feature_names.len() {
            return Err(PandaError::DimensionMismatch(format!(
                "row has {} values, model expects {}",
                values.len(),
                self.feature_names.len()
            )));
        }
        let sum: f64 = self.trees.iter().map(|t| t.predict(values)).sum();
        Ok(self.base_score + self.learning_rate * sum)
    }

    /// Prediction for a named row; every model feature must be present.
    pub fn predict(&self, row: &FeatureRow) -> Result<f64> {
        if row.names == self.feature_names {
            return self.predict_values(&row.values);
        }
        let aligned = self
            .feature_names
            .iter()
            .map(|n| row.get(n).ok_or_else(|| PandaError::MissingFeature(n.clone())))
            .collect::<Result<Vec<f64>>>()?;
        self.predict_values(&aligned)
    }

    pub fn serialize(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("ensemble serializes")
    }

    pub fn deserialize(bytes: &[u8]) -> Result<Self> {
        decode_tagged(bytes, FORMAT_TAG)
    }

    pub fn max_depth(&self) -> usize {
        self.trees.iter().map(Tree::depth).max().unwrap_or(0)
    }
}

/// Decodes a JSON document whose top-level `format` field must equal `tag`.
///
/// Unparseable bytes are reported as a corrupt payload; a readable but
/// different tag as a version mismatch.
pub(crate) fn decode_tagged<T: serde::de::DeserializeOwned>(bytes: &[u8], tag: &str) -> Result<T> {
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| PandaError::CorruptPayload(e.to_string()))?;
    match value.get("format").and_then(|f| f.as_str()) {
        Some(found) if found == tag => {}
        Some(found) => {
            return Err(PandaError::VersionMismatch {
                expected: tag.into(),
                found: found.into(),
            })
        }
        None => return Err(PandaError::CorruptPayload("missing format tag".into())),
    }
    serde_json::from_value(value).map_err(|e| PandaError::CorruptPayload(e.to_string()))
}

/// Fits a boosted ensemble on squared loss.
pub fn fit(features: &FeatureMatrix, labels: &[f64], opts: &TrainOptions) -> Result<BoostedEnsemble> {
    let n = features.n_rows();
    if n == 0 {
        return Err(PandaError::EmptyDataset("regressor needs at least one row".into()));
    }
    if features.n_cols() == 0 {
        return Err(PandaError::DimensionMismatch("regressor needs at least one column".into()));
    }
    if labels.len() != n {
        return Err(PandaError::DimensionMismatch(format!(
            "{n} feature rows but {} labels",
            labels.len()
        )));
    }
    if features.data.iter().any(|v| !v.is_finite()) {
        return Err(PandaError::NonFinite("features".into()));
    }
    if labels.iter().any(|v| !v.is_finite()) {
        return Err(PandaError::NonFinite("labels".into()));
    }
    Ok(tree::boost(features, labels, opts))
}
