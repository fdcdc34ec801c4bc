//! Image (L1, PSNR) and point-cloud color metrics.

pub mod assignment;
pub mod cloud;
pub mod image;

pub use assignment::linear_assignment;
pub use cloud::{
    cloud_color_l1_hungarian, cloud_color_l1_nn, splats_to_cloud, CloudMetricReport, MatchMode, HUNGARIAN_CAP,
};
pub use image::{image_l1, image_mse, image_psnr, ImageBatchReport, ImagePairReport, Psnr};

use thiserror::Error;

use crate::spatial::SpatialError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("image sizes differ: {}x{} vs {}x{}", a.0, a.1, b.0, b.1)]
    DimensionMismatch { a: (usize, usize), b: (usize, usize) },
    #[error("{0} cloud has no color channels")]
    ColorlessCloud(&'static str),
    #[error("{0} cloud is empty")]
    EmptyCloud(&'static str),
    #[error("assignment instance {pred}x{gt} exceeds the cap of {cap} points")]
    InstanceTooLarge { pred: usize, gt: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Spatial(#[from] SpatialError),
}

/// Compensated (Neumaier) sum, so means over millions of samples do not
/// drift with image size.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
