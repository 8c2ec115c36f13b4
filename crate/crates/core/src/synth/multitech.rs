use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::TechnologyNode;
use crate::error::{PandaError, Result};
use crate::transfer::TransferSample;

/// Small-design corpus settings.
///
/// A design's power at node `k` is `p0 · L_k · V_k² · (L_min / L_k)^scaling_exponent`
/// times relative noise, so the true target/source ratio is the CV² ratio
/// times a systematic, node-dependent correction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiTechSpec {
    pub seed: u64,
    pub designs: usize,
    pub noise_rel: f64,
    pub scaling_exponent: f64,
}

impl MultiTechSpec {
    pub fn default_for(seed: u64) -> Self {
        MultiTechSpec {
            seed,
            designs: 24,
            noise_rel: 0.03,
            scaling_exponent: 0.55,
        }
    }
}

/// Emits one sample per design and ordered node pair, designs outermost.
pub fn generate_multitech(spec: &MultiTechSpec, nodes: &[TechnologyNode]) -> Result<Vec<TransferSample>> {
    if nodes.len() < 2 {
        return Err(PandaError::InvalidArgument(
            "multi-technology corpus needs at least two nodes".into(),
        ));
    }
    for n in nodes {
        n.validate()?;
    }
    if spec.designs == 0 || !(0.0..1.0).contains(&spec.noise_rel) {
        return Err(PandaError::InvalidArgument(
            "multi-technology spec needs designs > 0 and noise_rel in [0, 1)".into(),
        ));
    }
    let l_min = nodes.iter().map(|n| n.feature_size).fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x6d75_6c74_6974_6563);
    let mut out = Vec::new();
    for d in 0..spec.designs {
        // Log-uniform base power between roughly 1 mW and 100 mW.
        let p0 = 10f64.powf(rng.random_range(-3.0..-1.0)) / (28.0 * 0.64);
        let powers: Vec<f64> = nodes
            .iter()
            .map(|n| {
                let systematic = (l_min / n.feature_size).powf(spec.scaling_exponent);
                let eps = 1.0 + spec.noise_rel * rng.random_range(-1.0..=1.0);
                p0 * n.feature_size * n.voltage * n.voltage * systematic * eps
            })
            .collect();
        for (i, s) in nodes.iter().enumerate() {
            for (j, t) in nodes.iter().enumerate() {
                if i == j {
                    continue;
                }
                out.push(TransferSample {
                    design_id: format!("D{:02}", d + 1),
                    source: s.clone(),
                    target: t.clone(),
                    source_power: powers[i],
                    target_power: powers[j],
                });
            }
        }
    }
    Ok(out)
}
