//! LiDAR → SfM registration: robust scale, correspondence-based coarse
//! alignment and trimmed ICP, composed into one similarity transform.

pub mod icp;
pub mod pipeline;
pub mod scale;
pub mod sim3;
pub mod umeyama;

use std::path::PathBuf;

pub use icp::{icp_refine, icp_refine_with_tree, IcpParams, IcpReport};
pub use pipeline::{
    filter_sfm_points, register_pipeline, PipelineParams, RegistrationResult, SfmFilterParams, StageTransforms,
};
pub use scale::{estimate_scale, robust_radius, RadiusMode, ScaleParams};
pub use sim3::{Sim3, TransformJson};
pub use umeyama::{umeyama, umeyama_align, CorrespondenceSet};

use crate::spatial::SpatialError;

#[derive(Debug, thiserror::Error)]
pub enum RegistrationError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("correspondence file line {line}: {detail}")]
    CorrespondenceSyntax { line: usize, detail: String },
    #[error("need at least 3 correspondences, got {0}")]
    TooFewCorrespondences(usize),
    #[error("need at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("degenerate configuration: {0}")]
    Degenerate(&'static str),
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("scale must be positive, got {0}")]
    InvalidScale(f64),
    #[error("no correspondences within the distance cap")]
    NoCorrespondences,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Spatial(#[from] SpatialError),
}
