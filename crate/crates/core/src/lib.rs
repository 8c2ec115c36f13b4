//! Architecture-level power, area, performance and energy models for
//! out-of-order cores.
//!
//! Each component's power is predicted as a learned per-unit term multiplied
//! by an analytical resource function of its configuration. The crate also
//! carries the comparison baselines, a cross-technology transfer model, a
//! synthetic ground-truth generator, evaluation protocols and a design-space
//! explorer.

pub mod baselines;
mod bundle;
pub mod dataset;
pub mod dse;
pub mod error;
pub mod evalharness;
pub mod par;
pub mod power_model;
pub mod quality;
pub mod regressor;
pub mod resource;
mod stats;
pub mod synth;
pub mod transfer;

pub use error::{PandaError, Result};
