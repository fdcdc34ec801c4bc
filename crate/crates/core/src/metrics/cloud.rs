//! Color agreement between a predicted and a ground-truth point cloud.
//!
//! Colors are compared in 0–255 units as the per-channel mean absolute
//! difference of each matched pair, averaged over pairs. Matching is
//! directed from prediction to ground truth.

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::gaussian::GaussianSplat;
use crate::spatial::KdTree;

use super::{linear_assignment, MetricsError, SCHEMA_VERSION};

pub const HUNGARIAN_CAP: usize = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    Nn,
    Hungarian,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloudMetricReport {
    pub schema: u32,
    pub mode: MatchMode,
    pub direction: String,
    pub color_scale: String,
    /// `None` when nothing matched.
    pub color_l1: Option<f64>,
    pub matched: usize,
    pub pred_count: usize,
    pub gt_count: usize,
    pub unmatched_fraction: f64,
    pub mean_match_distance: Option<f64>,
    pub max_match_distance: Option<f64>,
    pub total_match_distance: f64,
    /// `None` means unbounded.
    pub max_distance: Option<f64>,
}

fn check_inputs(pred: &PointCloud, gt: &PointCloud) -> Result<(), MetricsError> {
    for (cloud, side) in [(pred, "predicted"), (gt, "ground-truth")] {
        if cloud.is_empty() {
            return Err(MetricsError::EmptyCloud(side));
        }
        if !cloud.has_colors() {
            return Err(MetricsError::ColorlessCloud(side));
        }
    }
    Ok(())
}

fn color_l1(a: [u8; 3], b: [u8; 3]) -> f64 {
    a.iter()
        .zip(&b)
        .map(|(&x, &y)| (x as f64 - y as f64).abs())
        .sum::<f64>()
        / 3.0
}

/// `pairs` is `(pred index, gt index, distance)` in pred-index order.
fn report(
    mode: MatchMode,
    pred: &PointCloud,
    gt: &PointCloud,
    pairs: &[(usize, usize, f64)],
    max_distance: f64,
) -> CloudMetricReport {
    let matched = pairs.len();
    let color_sum: f64 = pairs
        .iter()
        .map(|&(i, j, _)| color_l1(pred.colors[i], gt.colors[j]))
        .sum();
    let dist_sum: f64 = pairs.iter().map(|p| p.2).sum();
    let (color, mean_d, max_d) = if matched == 0 {
        (None, None, None)
    } else {
        (
            Some(color_sum / matched as f64),
            Some(dist_sum / matched as f64),
            Some(pairs.iter().map(|p| p.2).fold(0.0, f64::max)),
        )
    };
    CloudMetricReport {
        schema: SCHEMA_VERSION,
        mode,
        direction: "pred_to_gt".into(),
        color_scale: "0-255".into(),
        color_l1: color,
        matched,
        pred_count: pred.len(),
        gt_count: gt.len(),
        unmatched_fraction: (pred.len() - matched) as f64 / pred.len() as f64,
        mean_match_distance: mean_d,
        max_match_distance: max_d,
        total_match_distance: dist_sum,
        max_distance: max_distance.is_finite().then_some(max_distance),
    }
}

/// Each predicted point against its nearest ground-truth point; matches
/// farther than `max_dist` count as unmatched.
pub fn cloud_color_l1_nn(pred: &PointCloud, gt: &PointCloud, max_dist: f64) -> Result<CloudMetricReport, MetricsError> {
    check_inputs(pred, gt)?;
    if !(max_dist > 0.0) {
        return Err(MetricsError::InvalidParameter(format!(
            "max distance {max_dist} must be positive"
        )));
    }
    let tree = KdTree::build(&gt.positions)?;
    let pairs: Vec<(usize, usize, f64)> = tree
        .nearest_batch(&pred.positions)
        .into_iter()
        .enumerate()
        .filter(|(_, m)| m.distance <= max_dist)
        .map(|(i, m)| (i, m.index, m.distance))
        .collect();
    Ok(report(MatchMode::Nn, pred, gt, &pairs, max_dist))
}

/// Exact one-to-one assignment minimizing the summed Euclidean distance.
/// With unequal sizes the smaller side is fully assigned.
pub fn cloud_color_l1_hungarian(
    pred: &PointCloud,
    gt: &PointCloud,
    cap: usize,
) -> Result<CloudMetricReport, MetricsError> {
    check_inputs(pred, gt)?;
    if pred.len() > cap || gt.len() > cap {
        return Err(MetricsError::InstanceTooLarge {
            pred: pred.len(),
            gt: gt.len(),
            cap,
        });
    }
    let dist = |i: usize, j: usize| (pred.positions[i] - gt.positions[j]).norm();
    let (assign, _) = linear_assignment(pred.len(), gt.len(), dist);
    let pairs: Vec<(usize, usize, f64)> = assign
        .iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| (i, j, dist(i, j))))
        .collect();
    Ok(report(MatchMode::Hungarian, pred, gt, &pairs, f64::INFINITY))
}

/// Splat means with their band-0 color seen from `+z`.
pub fn splats_to_cloud(splats: &[GaussianSplat]) -> PointCloud {
    PointCloud::new(
        splats.iter().map(|s| s.mean).collect(),
        splats.iter().map(GaussianSplat::canonical_color_u8).collect(),
    )
}
