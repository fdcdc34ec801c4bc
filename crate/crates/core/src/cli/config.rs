//! Run configuration file.
//!
//! A TOML file with optional tables `[paths]`, `[registration]`,
//! `[fusion]`, `[metrics]` and `[render]`; every key is optional and
//! unknown keys are rejected. Relative paths are resolved against the
//! directory holding the file. Command-line flags override environment
//! variables (`SPLATPRIOR_<FLAG>`), which override the file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::error::{CliError, ErrorKind};

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub paths: PathsConfig,
    pub registration: RegistrationConfig,
    pub fusion: FusionFileConfig,
    pub metrics: MetricsConfig,
    pub render: RenderConfig,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub lidar: Option<PathBuf>,
    pub colmap: Option<PathBuf>,
    pub correspondences: Option<PathBuf>,
    pub transform: Option<PathBuf>,
    pub splats: Option<PathBuf>,
    pub pred: Option<PathBuf>,
    pub gt: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegistrationConfig {
    /// `"percentile"` or `"max"`.
    pub radius_mode: Option<String>,
    pub percentile: Option<f64>,
    pub outlier_factor: Option<f64>,
    pub sfm_error_percentile: Option<f64>,
    pub sfm_distance_factor: Option<f64>,
    pub coarse_with_scale: Option<bool>,
    pub trim_fraction: Option<f64>,
    pub max_iterations: Option<usize>,
    pub relative_tolerance: Option<f64>,
    pub max_correspondence_distance: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionFileConfig {
    pub metric_edge: Option<f64>,
    pub frame_scale: Option<f64>,
    pub max_points: Option<usize>,
    pub opacity: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub mode: Option<String>,
    pub max_match_distance: Option<f64>,
    pub hungarian_cap: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    pub background: Option<[f64; 3]>,
    pub format: Option<String>,
    pub image_ids: Option<Vec<u32>>,
}

impl FileConfig {
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut cfg: FileConfig = toml::from_str(text)
            .map_err(|e| CliError::new(ErrorKind::InvalidConfig, format!("config: {}", e.message())))?;
        let p = &mut cfg.paths;
        for slot in [
            &mut p.lidar,
            &mut p.colmap,
            &mut p.correspondences,
            &mut p.transform,
            &mut p.splats,
            &mut p.pred,
            &mut p.gt,
            &mut p.output,
        ] {
            if let Some(path) = slot.as_mut() {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}
