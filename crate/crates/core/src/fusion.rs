//! Turn a registered LiDAR scan into a splatting initialization prior.

use std::path::{Path, PathBuf};

use nalgebra::UnitQuaternion;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloud::{PointCloud, Vec3};
use crate::gaussian::sh::dc_from_u8;
use crate::gaussian::GaussianSplat;
use crate::io::colmap::{encode_points3d_bin, ColmapError, SparsePoints};
use crate::io::splat_ply::SplatCloudFile;
use crate::registration::{RegistrationError, Sim3};
use crate::spatial::{voxel_downsample, KdTree, SpatialError};

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("input cloud has no color channels")]
    ColorlessInput,
    #[error("no points survive the transform")]
    EmptyResult,
    #[error("cannot export an empty cloud")]
    EmptyCloud,
    #[error("invalid fusion config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Transform(#[from] RegistrationError),
    #[error(transparent)]
    Spatial(#[from] SpatialError),
    #[error(transparent)]
    Colmap(#[from] ColmapError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionConfig {
    /// Voxel edge in meters.
    pub metric_edge: f64,
    /// SfM units per meter, normally the registration scale.
    pub frame_scale: f64,
    pub max_points: Option<usize>,
    pub opacity: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            metric_edge: 0.20,
            frame_scale: 1.0,
            max_points: None,
            opacity: 0.1,
        }
    }
}

impl FusionConfig {
    /// Voxel edge in SfM-frame units.
    pub fn edge(&self) -> f64 {
        self.metric_edge * self.frame_scale
    }

    pub fn validate(&self) -> Result<(), FusionError> {
        let edge = self.edge();
        if !(edge > 0.0 && edge.is_finite()) {
            return Err(FusionError::InvalidConfig(format!(
                "voxel edge {edge} must be positive"
            )));
        }
        if self.max_points == Some(0) {
            return Err(FusionError::InvalidConfig("point cap must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.opacity) {
            return Err(FusionError::InvalidConfig(format!(
                "opacity {} outside [0, 1]",
                self.opacity
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FusedPrior {
    pub cloud: PointCloud,
    pub splats: Vec<GaussianSplat>,
    pub edge: f64,
}

impl FusedPrior {
    pub fn splat_file(&self) -> SplatCloudFile {
        SplatCloudFile {
            records: self.splats.iter().map(GaussianSplat::to_record).collect(),
        }
    }
}

/// Evenly spaced index subsample down to `cap` points.
fn cap_points(cloud: PointCloud, cap: Option<usize>) -> PointCloud {
    match cap {
        Some(cap) if cloud.len() > cap => {
            let n = cloud.len();
            let mut next = 0usize;
            let mut taken = 0usize;
            cloud.filter_indices(|i| {
                if taken < cap && i == next {
                    taken += 1;
                    next = taken * n / cap;
                    true
                } else {
                    false
                }
            })
        }
        _ => cloud,
    }
}

/// Mean distance to the three nearest other points (fewer if the cloud is
/// that small), clamped to `[edge/4, 4·edge]`. A lone point gets `edge`.
pub fn seed_scales(positions: &[Vec3], edge: f64) -> Result<Vec<f64>, FusionError> {
    let tree = KdTree::build(positions)?;
    Ok(positions
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let others: Vec<f64> = tree
                .knn(p, 4)
                .into_iter()
                .filter(|n| n.index != i)
                .take(3)
                .map(|n| n.distance)
                .collect();
            if others.is_empty() {
                return edge;
            }
            let mean = others.iter().sum::<f64>() / others.len() as f64;
            mean.clamp(edge / 4.0, 4.0 * edge)
        })
        .collect())
}

pub fn fuse_prior(raw: &PointCloud, transform: &Sim3, cfg: &FusionConfig) -> Result<FusedPrior, FusionError> {
    cfg.validate()?;
    transform.validate()?;
    if !raw.has_colors() {
        return Err(FusionError::ColorlessInput);
    }
    let moved = transform.apply_cloud(raw);
    let moved = moved.filter_indices(|i| moved.positions[i].iter().all(|v| v.is_finite()));
    if moved.is_empty() {
        return Err(FusionError::EmptyResult);
    }
    let edge = cfg.edge();
    let cloud = cap_points(voxel_downsample(&moved, edge)?, cfg.max_points);
    let scales = seed_scales(&cloud.positions, edge)?;
    let splats = cloud
        .positions
        .iter()
        .zip(&cloud.colors)
        .zip(&scales)
        .map(|((p, c), &s)| GaussianSplat {
            mean: *p,
            scales: Vec3::repeat(s),
            rotation: UnitQuaternion::identity(),
            opacity: cfg.opacity,
            sh: vec![dc_from_u8(*c)],
        })
        .collect();
    Ok(FusedPrior { cloud, splats, edge })
}

const PASSTHROUGH: [&str; 4] = ["cameras.bin", "cameras.txt", "images.bin", "images.txt"];

/// The files [`export_colmap_points`] writes, as `(name, bytes)` pairs.
pub fn colmap_export_files(cloud: &PointCloud, sfm_dir: Option<&Path>) -> Result<Vec<(String, Vec<u8>)>, FusionError> {
    if cloud.is_empty() {
        return Err(FusionError::EmptyCloud);
    }
    if !cloud.has_colors() {
        return Err(FusionError::ColorlessInput);
    }
    let mut files = vec![(
        "points3D.bin".to_string(),
        encode_points3d_bin(&SparsePoints::from_cloud(cloud.clone())),
    )];
    if let Some(src) = sfm_dir {
        for name in PASSTHROUGH {
            let from = src.join(name);
            if from.is_file() {
                let bytes = std::fs::read(&from).map_err(|source| FusionError::Io {
                    path: from.clone(),
                    source,
                })?;
                files.push((name.to_string(), bytes));
            }
        }
    }
    Ok(files)
}

/// Writes `points3D.bin` into `out_dir` (fresh ids, zero error, no tracks)
/// and copies any camera and image files from `sfm_dir` unchanged.
pub fn export_colmap_points(cloud: &PointCloud, sfm_dir: Option<&Path>, out_dir: &Path) -> Result<(), FusionError> {
    let files = colmap_export_files(cloud, sfm_dir)?;
    let io = |path: PathBuf| move |source| FusionError::Io { path, source };
    std::fs::create_dir_all(out_dir).map_err(io(out_dir.to_path_buf()))?;
    for (name, bytes) in files {
        let path = out_dir.join(name);
        std::fs::write(&path, bytes).map_err(io(path.clone()))?;
    }
    Ok(())
}
