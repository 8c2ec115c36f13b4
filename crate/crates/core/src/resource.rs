//! Analytical resource functions: one closed-form size proxy per component.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::dataset::{ComponentId, Dataset, DesignConfiguration};
use crate::error::{PandaError, Result};
use crate::stats;

/// Biases and the reserve-station table that parameterize the resource functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceParams {
    pub itlb_bias: f64,
    pub dtlb_bias: f64,
    pub otherlogic_bias: f64,
    /// DecodeWidth → reserve-station count. `None` means the identity map.
    pub reserve_station_lookup: Option<BTreeMap<u32, f64>>,
    pub fitted: bool,
    /// Components whose bias fell back to the default during fitting.
    #[serde(default)]
    pub fallbacks: Vec<ComponentId>,
}

impl Default for ResourceParams {
    fn default() -> Self {
        ResourceParams {
            itlb_bias: 0.0,
            dtlb_bias: 0.0,
            otherlogic_bias: 0.0,
            reserve_station_lookup: None,
            fitted: false,
            fallbacks: Vec::new(),
        }
    }
}

impl ResourceParams {
    pub fn with_biases(itlb: f64, dtlb: f64, other_logic: f64) -> Self {
        ResourceParams {
            itlb_bias: itlb,
            dtlb_bias: dtlb,
            otherlogic_bias: other_logic,
            ..Default::default()
        }
    }

    pub fn bias(&self, c: ComponentId) -> Option<f64> {
        match c {
            ComponentId::ITLB => Some(self.itlb_bias),
            ComponentId::DTLB => Some(self.dtlb_bias),
            ComponentId::OtherLogic => Some(self.otherlogic_bias),
            _ => None,
        }
    }

    fn set_bias(&mut self, c: ComponentId, v: f64) {
        match c {
            ComponentId::ITLB => self.itlb_bias = v,
            ComponentId::DTLB => self.dtlb_bias = v,
            ComponentId::OtherLogic => self.otherlogic_bias = v,
            _ => unreachable!("{c} has no bias"),
        }
    }

    pub fn reserve_stations(&self, decode_width: u32) -> Result<f64> {
        match &self.reserve_station_lookup {
            None => Ok(decode_width as f64),
            Some(table) => table
                .get(&decode_width)
                .copied()
                .ok_or(PandaError::MissingLookup(decode_width)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, b) in [
            ("itlb", self.itlb_bias),
            ("dtlb", self.dtlb_bias),
            ("other_logic", self.otherlogic_bias),
        ] {
            if !(b.is_finite() && b >= 0.0) {
                return Err(PandaError::InvalidArgument(format!("{name} bias must be finite and >= 0, got {b}")));
            }
        }
        if let Some(table) = &self.reserve_station_lookup {
            if let Some((w, r)) = table.iter().find(|(_, r)| !(r.is_finite() && **r > 0.0)) {
                return Err(PandaError::InvalidArgument(format!(
                    "reserve-station entry for DecodeWidth {w} must be positive, got {r}"
                )));
            }
        }
        Ok(())
    }
}

/// Resource function of `component` at `config`.
pub fn eval_resource(component: ComponentId, config: &DesignConfiguration, params: &ResourceParams) -> Result<f64> {
    let c = config;
    let v = match component {
        ComponentId::BP => c.fetch_width as f64,
        ComponentId::IFU => c.decode_width as f64,
        ComponentId::ITLB => c.dtlb_entry as f64 + params.itlb_bias,
        ComponentId::ICache => c.icache_way as f64 * c.icache_fetch_bytes as f64,
        ComponentId::RNU => c.decode_width as f64,
        ComponentId::ROB => c.rob_entry as f64,
        ComponentId::ISU => params.reserve_stations(c.decode_width)?,
        ComponentId::Regfile => c.int_phy_register as f64 + c.fp_phy_register as f64,
        ComponentId::FUPool => 1.0,
        ComponentId::LSU => c.ldq_entry as f64 + c.stq_entry as f64,
        ComponentId::DTLB => c.dtlb_entry as f64 + params.dtlb_bias,
        ComponentId::DCache => c.dcache_way as f64 * c.mem_issue_width as f64,
        ComponentId::OtherLogic => c.decode_width as f64 + params.otherlogic_bias,
    };
    Ok(v)
}

/// The configuration parameter a biased resource function is linear in.
fn bias_driver(component: ComponentId, config: &DesignConfiguration) -> f64 {
    match component {
        ComponentId::ITLB | ComponentId::DTLB => config.dtlb_entry as f64,
        ComponentId::OtherLogic => config.decode_width as f64,
        _ => unreachable!(),
    }
}

/// Per-configuration mean of `value` over that configuration's workloads,
/// in order of first appearance.
pub(crate) fn per_config_means<F>(train: &Dataset, mut value: F) -> Result<Vec<(DesignConfiguration, f64)>>
where
    F: FnMut(&crate::dataset::Sample) -> Result<f64>,
{
    let mut out = Vec::new();
    for cfg in train.configs() {
        let vals = train
            .samples_for(&cfg.id)
            .map(&mut value)
            .collect::<Result<Vec<f64>>>()?;
        out.push((cfg, stats::mean(&vals)));
    }
    Ok(out)
}

/// Fits the ITLB, DTLB and other-logic biases from component power labels.
///
/// Each bias is `intercept / slope` of a least-squares line through the
/// per-configuration mean power against the driving parameter. Biases that
/// cannot be identified keep their value from `defaults`.
pub fn fit_resource_params(train: &Dataset, defaults: &ResourceParams) -> Result<ResourceParams> {
    train.require_non_empty("cannot fit resource parameters")?;
    train.require_component_power()?;
    defaults.validate()?;
    let mut params = defaults.clone();
    params.fallbacks.clear();

    for component in [ComponentId::ITLB, ComponentId::DTLB, ComponentId::OtherLogic] {
        let points = per_config_means(train, |s| s.component_power_of(component))?;
        let xs: Vec<f64> = points.iter().map(|(c, _)| bias_driver(component, c)).collect();
        let ys: Vec<f64> = points.iter().map(|(_, p)| *p).collect();
        match stats::linear_fit(&xs, &ys) {
            Some((slope, intercept)) if slope > 0.0 && slope.is_finite() && intercept.is_finite() => {
                let raw = intercept / slope;
                if raw < 0.0 {
                    warn!("{component}: fitted bias {raw:.4} is negative; clamping to 0");
                }
                params.set_bias(component, raw.max(0.0));
            }
            fit => {
                let why = match fit {
                    None => "fewer than two distinct driving-parameter values".to_string(),
                    Some((slope, _)) => format!("non-positive slope {slope:.3e}"),
                };
                warn!(
                    "{component}: bias not identifiable from training data ({why}); using default {}",
                    defaults.bias(component).unwrap_or(0.0)
                );
                params.fallbacks.push(component);
            }
        }
    }

    for cfg in train.configs() {
        params.reserve_stations(cfg.decode_width)?;
    }
    params.fitted = true;
    Ok(params)
}

/// User-supplied resource-function settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reserve_station_lookup: Option<BTreeMap<u32, f64>>,
    #[serde(default)]
    pub default_biases: DefaultBiases,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefaultBiases {
    #[serde(default)]
    pub itlb: f64,
    #[serde(default)]
    pub dtlb: f64,
    #[serde(default)]
    pub other_logic: f64,
}

impl ModelConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| PandaError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| PandaError::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// Unfitted parameters to seed fitting with.
    pub fn defaults(&self) -> Result<ResourceParams> {
        let p = ResourceParams {
            itlb_bias: self.default_biases.itlb,
            dtlb_bias: self.default_biases.dtlb,
            otherlogic_bias: self.default_biases.other_logic,
            reserve_station_lookup: self.reserve_station_lookup.clone(),
            fitted: false,
            fallbacks: Vec::new(),
        };
        p.validate()?;
        Ok(p)
    }
}
