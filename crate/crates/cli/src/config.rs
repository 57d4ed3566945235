//! Optional TOML configuration. Command-line flags override file values,
//! which override built-in defaults.

use std::path::Path;

use anyhow::Context;
use pgt_core::{SensorConfig, Vec3};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub sensor: SensorSection,
    #[serde(default)]
    pub extract: ExtractSection,
    #[serde(default)]
    pub bank: BankSection,
    #[serde(default)]
    pub augment: AugmentSection,
    #[serde(default)]
    pub eval: EvalSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSection {
    pub channels: Option<usize>,
    pub azimuth_resolution: Option<usize>,
    pub fov_up: Option<f64>,
    pub fov_down: Option<f64>,
    pub max_range: Option<f64>,
    pub height: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractSection {
    pub step: Option<f64>,
    pub density_min: Option<f64>,
    pub decode: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BankSection {
    pub headings: Option<Vec<f64>>,
    pub ranges: Option<Vec<f64>>,
    pub sigma: Option<f64>,
    pub clip: Option<f64>,
    pub min_points: Option<usize>,
    pub k: Option<usize>,
    pub bins: Option<usize>,
    pub patches: Option<usize>,
    pub estimator: Option<String>,
    pub align: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentSection {
    pub mix: Option<String>,
    pub max_dist: Option<f64>,
    pub per_frame: Option<usize>,
    pub sampler: Option<String>,
    pub occlusion: Option<bool>,
    pub map: Option<String>,
    pub range_tolerance: Option<f64>,
    pub max_attempts: Option<usize>,
    pub ground_cell: Option<f64>,
    pub z_tol: Option<f64>,
    pub density_threshold: Option<u32>,
    pub sweeps: Option<usize>,
    pub sweep_dt: Option<f64>,
    pub sweep_speed: Option<f64>,
    pub sweep_yaw_rate: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub lambda: Option<f64>,
    pub patches: Option<usize>,
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).map_err(|e| {
            anyhow::Error::new(pgt_core::Error::Format {
                offset: None,
                message: format!("{}: {e}", path.display()),
            })
        })
    }

    /// nuScenes-like defaults with any [sensor] overrides.
    pub fn sensor(&self) -> pgt_core::Result<SensorConfig> {
        let d = SensorConfig::nuscenes();
        let s = &self.sensor;
        SensorConfig::new(
            s.channels.unwrap_or(d.channels),
            s.azimuth_resolution.unwrap_or(d.azimuth_resolution),
            s.fov_up.unwrap_or(d.fov_up),
            s.fov_down.unwrap_or(d.fov_down),
            s.max_range.unwrap_or(d.max_range),
            Vec3::new(0.0, 0.0, s.height.unwrap_or(d.sensor_origin.z)),
        )
    }
}
