//! Deterministic CPU splat renderer: EWA projection through a pinhole
//! camera and front-to-back alpha compositing.

pub mod camera;
pub mod image;
pub mod project;
pub mod raster;

pub use camera::PinholeCamera;
pub use image::RgbImage;
pub use project::{project_splat, Projected2DGaussian, LOW_PASS, Z_NEAR};
pub use raster::{render, render_with_alpha, RenderOptions};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("nothing to render")]
    EmptyScene,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("PNG encoding failed: {0}")]
    PngEncode(#[from] png::EncodingError),
    #[error("PNG decoding failed: {0}")]
    PngDecode(#[from] png::DecodingError),
    #[error("unsupported image: {0}")]
    UnsupportedImage(String),
    #[error("malformed raw float image: {0}")]
    MalformedRaw(String),
    #[error("image has a non-finite sample at index {0}")]
    NonFinite(usize),
}
