//! Metrics, evaluation protocols and resource-function diagnostics.

mod diagnostics;
mod metrics;
mod protocol;

pub use diagnostics::{resource_diagnostics, FresGroup, ResourceDiagnostics};
pub use metrics::{mape, pearson_r};
pub use protocol::{
    run_protocol, run_special_case, train_model, ConfigMetrics, EvalOptions, EvalReport, ModelKind, Prediction,
    TrainedModel, SPECIAL_IDS,
};
