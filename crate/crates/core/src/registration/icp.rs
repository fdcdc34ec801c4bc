//! Trimmed point-to-point ICP with the scale held fixed.
//!
//! Each round matches every transformed source point to its nearest target
//! point, keeps the `trim_fraction` best matches within the distance cap,
//! and composes a closed-form rigid update. The kept count never grows
//! between rounds, which makes the trimmed RMS non-increasing; a round that
//! would still increase it (rounding) is rejected and ends the run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{PointCloud, Vec3};
use crate::spatial::KdTree;

use super::{umeyama, RegistrationError, Sim3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IcpParams {
    pub max_iterations: usize,
    /// Stop once the RMS improves by less than this fraction.
    pub relative_tolerance: f64,
    /// Fraction of valid matches kept each round, in `(0, 1]`.
    pub trim_fraction: f64,
    pub max_correspondence_distance: f64,
}

impl Default for IcpParams {
    fn default() -> Self {
        IcpParams {
            max_iterations: 50,
            relative_tolerance: 1e-6,
            trim_fraction: 0.9,
            max_correspondence_distance: f64::INFINITY,
        }
    }
}

impl IcpParams {
    pub fn validate(&self) -> Result<(), RegistrationError> {
        if !(self.trim_fraction > 0.0 && self.trim_fraction <= 1.0) {
            return Err(RegistrationError::InvalidParameter(format!(
                "trim fraction {} not in (0, 1]",
                self.trim_fraction
            )));
        }
        if !(self.max_correspondence_distance > 0.0) {
            return Err(RegistrationError::InvalidParameter(format!(
                "max correspondence distance {} must be positive",
                self.max_correspondence_distance
            )));
        }
        if !(self.relative_tolerance >= 0.0) {
            return Err(RegistrationError::InvalidParameter("negative tolerance".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IcpReport {
    /// Matching rounds whose RMS was accepted.
    pub iterations: usize,
    pub final_rms: Option<f64>,
    pub rms_history: Vec<f64>,
    pub inlier_fraction: f64,
    pub converged: bool,
}

/// RMS below which the alignment is taken as exact.
const EXACT_RMS: f64 = 1e-15;

pub fn icp_refine(
    source: &PointCloud,
    target: &PointCloud,
    init: &Sim3,
    params: &IcpParams,
) -> Result<(Sim3, IcpReport), RegistrationError> {
    let tree = KdTree::build(&target.positions)?;
    icp_refine_with_tree(&source.positions, &target.positions, &tree, init, params)
}

pub fn icp_refine_with_tree(
    source: &[Vec3],
    target: &[Vec3],
    tree: &KdTree,
    init: &Sim3,
    params: &IcpParams,
) -> Result<(Sim3, IcpReport), RegistrationError> {
    params.validate()?;
    init.validate()?;
    if source.is_empty() {
        return Err(RegistrationError::NoCorrespondences);
    }
    let mut current = *init;
    let mut previous: Option<Sim3> = None;
    let mut kept_cap = usize::MAX;
    let mut report = IcpReport {
        iterations: 0,
        final_rms: None,
        rms_history: Vec::new(),
        inlier_fraction: 0.0,
        converged: false,
    };

    for _ in 0..params.max_iterations {
        let moved: Vec<Vec3> = source.par_iter().map(|p| current.apply(p)).collect();
        let matches = tree.nearest_batch(&moved);

        let mut valid: Vec<(f64, usize)> = matches
            .iter()
            .enumerate()
            .filter(|(_, m)| m.distance <= params.max_correspondence_distance)
            .map(|(i, m)| (m.distance, i))
            .collect();
        if valid.is_empty() {
            return Err(RegistrationError::NoCorrespondences);
        }
        let wanted = ((params.trim_fraction * valid.len() as f64).ceil() as usize).clamp(1, valid.len());
        let keep = wanted.min(kept_cap);
        if keep < valid.len() {
            valid.select_nth_unstable_by(keep - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            valid.truncate(keep);
        }
        // Sum in source-index order so the value does not depend on the
        // selection algorithm.
        valid.sort_unstable_by_key(|&(_, i)| i);
        let sum_sq: f64 = valid.iter().map(|(d, _)| d * d).sum();
        let rms = (sum_sq / keep as f64).sqrt();
        if !rms.is_finite() {
            return Err(RegistrationError::NonFinite("ICP residual"));
        }

        if let Some(&last) = report.rms_history.last() {
            if rms > last {
                // Only reachable through rounding; keep the better pose.
                current = previous.expect("a previous pose exists after the first round");
                report.converged = true;
                break;
            }
        }
        report.rms_history.push(rms);
        report.iterations += 1;
        report.final_rms = Some(rms);
        report.inlier_fraction = keep as f64 / source.len() as f64;

        let improved_little = report
            .rms_history
            .len()
            .checked_sub(2)
            .map(|k| report.rms_history[k] - rms <= params.relative_tolerance * report.rms_history[k])
            .unwrap_or(false);
        if rms <= EXACT_RMS || improved_little {
            report.converged = true;
            break;
        }

        let src: Vec<Vec3> = valid.iter().map(|&(_, i)| moved[i]).collect();
        let dst: Vec<Vec3> = valid.iter().map(|&(_, i)| target[matches[i].index]).collect();
        let delta = umeyama(&src, &dst, false)?;
        let next = delta.compose(&current);
        next.validate()
            .map_err(|_| RegistrationError::NonFinite("ICP update"))?;
        previous = Some(current);
        current = next;
        kept_cap = keep;
    }
    Ok((current, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{UnitQuaternion, Vector3};

    fn l_shaped_scene() -> PointCloud {
        // Two orthogonal walls and a floor, irregularly sampled.
        let mut pts = Vec::new();
        for i in 0..40 {
            for j in 0..40 {
                let u = i as f64 / 39.0 + 0.003 * ((i * 7 + j * 3) % 5) as f64;
                let v = j as f64 / 39.0;
                pts.push(Vec3::new(u * 2.0, v, 0.0));
                pts.push(Vec3::new(0.0, v, u * 0.8));
                pts.push(Vec3::new(u * 2.0, 0.0, v * 0.8));
            }
        }
        pts.push(Vec3::new(1.7, 0.9, 0.6));
        PointCloud::from_positions(pts)
    }

    #[test]
    fn exact_init_converges_immediately() {
        let cloud = l_shaped_scene();
        let (t, rep) = icp_refine(&cloud, &cloud, &Sim3::identity(), &IcpParams::default()).unwrap();
        assert!(rep.converged);
        assert!(rep.iterations <= 2);
        assert!(rep.final_rms.unwrap() < 1e-9);
        assert_eq!(t, Sim3::identity());
    }

    #[test]
    fn recovers_small_rigid_perturbation() {
        let target = l_shaped_scene();
        let gt = Sim3::rigid(
            UnitQuaternion::from_axis_angle(&Vector3::y_axis(), 3f64.to_radians()),
            Vec3::new(0.03, -0.02, 0.01),
        );
        // source = gt⁻¹(target), so ICP has to find gt.
        let source = gt.inverse().apply_cloud(&target);
        let params = IcpParams {
            max_iterations: 200,
            ..IcpParams::default()
        };
        let (t, rep) = icp_refine(&source, &target, &Sim3::identity(), &params).unwrap();
        assert!(t.rotation_error_deg(&gt) < 0.1, "{}", t.rotation_error_deg(&gt));
        let c = Vec3::new(1.0, 0.5, 0.4);
        assert!((t.apply(&c) - gt.apply(&c)).norm() < 2e-3);
        assert!(rep.rms_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn disjoint_clouds_have_no_correspondences() {
        let target = l_shaped_scene();
        let source = target.map_positions(|p| p + Vec3::new(100.0, 0.0, 0.0));
        let params = IcpParams {
            max_correspondence_distance: 1.0,
            ..IcpParams::default()
        };
        assert!(matches!(
            icp_refine(&source, &target, &Sim3::identity(), &params),
            Err(RegistrationError::NoCorrespondences)
        ));
    }

    #[test]
    fn zero_budget_returns_init() {
        let cloud = l_shaped_scene();
        let init = Sim3::from_scale(2.0);
        let params = IcpParams {
            max_iterations: 0,
            ..IcpParams::default()
        };
        let (t, rep) = icp_refine(&cloud, &cloud, &init, &params).unwrap();
        assert_eq!(t, init);
        assert!(!rep.converged);
        assert_eq!(rep.final_rms, None);
    }

    #[test]
    fn bad_trim_rejected() {
        let cloud = l_shaped_scene();
        let params = IcpParams {
            trim_fraction: 0.0,
            ..IcpParams::default()
        };
        assert!(icp_refine(&cloud, &cloud, &Sim3::identity(), &params).is_err());
    }
}
