use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{ComponentId, Dataset};
use crate::error::{PandaError, Result};
use crate::resource::{eval_resource, ResourceParams};
use crate::stats;

/// Samples sharing one resource-function value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FresGroup {
    pub fres: f64,
    pub samples: usize,
    pub power_mean: f64,
    pub power_std: f64,
    pub ratio_mean: f64,
    pub ratio_std: f64,
}

/// How strongly a component's power follows its resource function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceDiagnostics {
    pub component: ComponentId,
    pub groups: Vec<FresGroup>,
    /// Standard deviation of the group means of power over its grand mean.
    pub power_spread: f64,
    /// The same for `power / F_res`.
    pub ratio_spread: f64,
    /// `(F_res, power)` for every sample, in dataset order.
    pub scatter: Vec<(f64, f64)>,
    pub note: Option<String>,
}

fn relative_spread(group_means: &[f64], all: &[f64]) -> f64 {
    let grand = stats::mean(all);
    if grand == 0.0 {
        return 0.0;
    }
    stats::std_dev(group_means) / grand.abs()
}

pub fn resource_diagnostics(ds: &Dataset, component: ComponentId, params: &ResourceParams) -> Result<ResourceDiagnostics> {
    ds.require_non_empty("cannot run diagnostics")?;
    let mut scatter = Vec::with_capacity(ds.len());
    for s in &ds.samples {
        scatter.push((eval_resource(component, &s.config, params)?, s.component_power_of(component)?));
    }
    let mut keys: Vec<f64> = scatter.iter().map(|(f, _)| *f).collect();
    keys.sort_by(f64::total_cmp);
    keys.dedup();

    let mut groups = Vec::with_capacity(keys.len());
    for f in &keys {
        let power: Vec<f64> = scatter.iter().filter(|(g, _)| g == f).map(|(_, p)| *p).collect();
        let ratio: Vec<f64> = power.iter().map(|p| p / f).collect();
        groups.push(FresGroup {
            fres: *f,
            samples: power.len(),
            power_mean: stats::mean(&power),
            power_std: stats::std_dev(&power),
            ratio_mean: stats::mean(&ratio),
            ratio_std: stats::std_dev(&ratio),
        });
    }

    let (power_spread, ratio_spread, note) = if groups.len() < 2 {
        (0.0, 0.0, Some("single resource-function value; spread undefined".to_string()))
    } else {
        let all_p: Vec<f64> = scatter.iter().map(|(_, p)| *p).collect();
        let all_r: Vec<f64> = scatter.iter().map(|(f, p)| p / f).collect();
        let pm: Vec<f64> = groups.iter().map(|g| g.power_mean).collect();
        let rm: Vec<f64> = groups.iter().map(|g| g.ratio_mean).collect();
        (relative_spread(&pm, &all_p), relative_spread(&rm, &all_r), None)
    };

    Ok(ResourceDiagnostics {
        component,
        groups,
        power_spread,
        ratio_spread,
        scatter,
        note,
    })
}

impl ResourceDiagnostics {
    pub fn scatter_csv(&self) -> String {
        let mut out = String::from("fres,power,power_over_fres\n");
        for (f, p) in &self.scatter {
            out.push_str(&format!("{f},{p},{}\n", p / f));
        }
        out
    }

    pub fn groups_csv(&self) -> String {
        let mut out = String::from("fres,samples,power_mean,power_std,ratio_mean,ratio_std\n");
        for g in &self.groups {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                g.fres, g.samples, g.power_mean, g.power_std, g.ratio_mean, g.ratio_std
            ));
        }
        out
    }

    /// Writes `<component>_fres_power.csv` (scatter) and `<component>_fres_groups.csv` into `dir`.
    pub fn write_csv(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        let name = self.component.name();
        let scatter = dir.join(format!("{name}_fres_power.csv"));
        let groups = dir.join(format!("{name}_fres_groups.csv"));
        fs::write(&scatter, self.scatter_csv()).map_err(|e| PandaError::io(&scatter, e))?;
        fs::write(&groups, self.groups_csv()).map_err(|e| PandaError::io(&groups, e))?;
        Ok(vec![scatter, groups])
    }
}
