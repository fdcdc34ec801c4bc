//! Scale → coarse → ICP registration of a LiDAR scan into an SfM frame.

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::spatial::KdTree;

use super::scale::{centered_distances, nearest_rank};
use super::{
    estimate_scale, icp_refine_with_tree, umeyama_align, CorrespondenceSet, IcpParams, IcpReport, RegistrationError,
    ScaleParams, Sim3,
};

/// Pre-filter for the SfM sparse cloud.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SfmFilterParams {
    /// Points whose reprojection error exceeds this nearest-rank percentile
    /// are dropped.
    pub error_percentile: f64,
    /// Points farther than this multiple of the median centroid distance
    /// are dropped.
    pub distance_factor: f64,
}

impl Default for SfmFilterParams {
    fn default() -> Self {
        SfmFilterParams {
            error_percentile: 90.0,
            distance_factor: 5.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub scale: ScaleParams,
    pub sfm_filter: SfmFilterParams,
    /// Let the correspondence fit correct the estimated scale.
    pub coarse_with_scale: bool,
    pub icp: IcpParams,
}

impl PipelineParams {
    pub fn new() -> Self {
        PipelineParams {
            coarse_with_scale: true,
            ..Default::default()
        }
    }
}

/// Each stage's transform; `total = icp ∘ coarse ∘ scale_only`.
#[derive(Clone, Debug, PartialEq)]
pub struct StageTransforms {
    pub scale_only: Sim3,
    pub coarse: Sim3,
    pub icp: Sim3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegistrationResult {
    pub transform: Sim3,
    pub stages: StageTransforms,
    pub estimated_scale: f64,
    pub sfm_points_used: usize,
    pub icp: IcpReport,
}

/// Drops high-error and far-from-center SfM points. `errors`, when given,
/// holds one reprojection error per point.
pub fn filter_sfm_points(
    cloud: &PointCloud,
    errors: Option<&[f64]>,
    params: &SfmFilterParams,
) -> Result<PointCloud, RegistrationError> {
    if cloud.is_empty() {
        return Err(RegistrationError::TooFewPoints { needed: 1, found: 0 });
    }
    let error_cut = match errors {
        Some(e) if e.len() != cloud.len() => return Err(RegistrationError::LengthMismatch(cloud.len(), e.len())),
        Some(e) => {
            let mut scratch = e.to_vec();
            Some(nearest_rank(&mut scratch, params.error_percentile))
        }
        None => None,
    };
    let (dists, _) = centered_distances(&cloud.positions, f64::INFINITY);
    let mut scratch = dists.clone();
    let median = nearest_rank(&mut scratch, 50.0);
    let max_dist = params.distance_factor * median;
    Ok(cloud.filter_indices(|i| {
        dists[i] <= max_dist && error_cut.is_none_or(|cut| errors.expect("cut implies errors")[i] <= cut)
    }))
}

pub fn register_pipeline(
    raw_lidar: &PointCloud,
    sfm_points: &PointCloud,
    sfm_errors: Option<&[f64]>,
    corr: &CorrespondenceSet,
    params: &PipelineParams,
) -> Result<RegistrationResult, RegistrationError> {
    params.icp.validate()?;
    let sfm = filter_sfm_points(sfm_points, sfm_errors, &params.sfm_filter)?;
    let estimated_scale = estimate_scale(raw_lidar, &sfm, &params.scale)?;
    let scale_only = Sim3::from_scale(estimated_scale);

    let coarse = umeyama_align(&corr.with_source_transformed(&scale_only), params.coarse_with_scale)?;
    let init = coarse.compose(&scale_only);

    let tree = KdTree::build(&sfm.positions)?;
    let (refined, report) = icp_refine_with_tree(&raw_lidar.positions, &sfm.positions, &tree, &init, &params.icp)?;
    let icp = refined.compose(&init.inverse());
    Ok(RegistrationResult {
        transform: refined,
        stages: StageTransforms {
            scale_only,
            coarse,
            icp,
        },
        estimated_scale,
        sfm_points_used: sfm.len(),
        icp: report,
    })
}
