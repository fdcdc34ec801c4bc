//! Gaussian primitives: densities, covariances and their eigenstructure,
//! spherical-harmonic color, and the splat record itself.

pub mod covariance;
pub mod eigen;
pub mod pdf;
pub mod sh;
pub mod splat;

pub use covariance::{
    build_covariance, quadratic_form_bound_check, sample_covariance, Covariance3, QuadraticFormReport,
};
pub use eigen::{eigen_decompose, EigenDecomposition};
pub use pdf::{gaussian_log_pdf_nd, gaussian_pdf_1d, gaussian_pdf_nd};
pub use sh::{sh_to_color, SH_C0};
pub use splat::GaussianSplat;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GaussianError {
    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),
    #[error("dimension mismatch: point {point}, mean {mean}, covariance {}x{}", covariance.0, covariance.1)]
    DimensionMismatch {
        point: usize,
        mean: usize,
        covariance: (usize, usize),
    },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("covariance is singular")]
    Singular,
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("scale must be positive and finite, got {0}")]
    NonPositiveScale(f64),
    #[error("quaternion norm {0} is too far from 1")]
    BadQuaternion(f64),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("{0} SH coefficients is not 3·(d+1)² for a degree d ≤ 3")]
    MalformedShCount(usize),
    #[error("view direction must be unit length, norm is {0}")]
    NonUnitViewDirection(f64),
    #[error("opacity {0} outside [0, 1]")]
    BadOpacity(f64),
}
