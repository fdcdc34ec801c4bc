//! Scale estimation between a metric scan and a scale-free SfM cloud.
//!
//! Both clouds are summarized by a robust radius: distances from the
//! coordinate-wise median, with points beyond `outlier_factor` times the
//! median distance discarded, then either a nearest-rank percentile or the
//! maximum of what is left.

use serde::{Deserialize, Serialize};

use crate::cloud::{PointCloud, Vec3};

use super::RegistrationError;

pub const MIN_POINTS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RadiusMode {
    Percentile { percentile: f64 },
    MaxDistance,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleParams {
    pub radius: RadiusMode,
    pub outlier_factor: f64,
}

impl Default for ScaleParams {
    fn default() -> Self {
        ScaleParams {
            radius: RadiusMode::Percentile { percentile: 95.0 },
            outlier_factor: 5.0,
        }
    }
}

/// Nearest-rank percentile: the value at rank `⌈p/100 · n⌉` of the sorted
/// data (rank clamped to `1..=n`). Reorders `values`.
///
/// # Panics
/// On an empty slice.
pub fn nearest_rank(values: &mut [f64], percentile: f64) -> f64 {
    assert!(!values.is_empty());
    let n = values.len();
    let rank = ((percentile / 100.0) * n as f64).ceil() as usize;
    let k = rank.clamp(1, n) - 1;
    *values.select_nth_unstable_by(k, |a, b| a.total_cmp(b)).1
}

pub fn coordinate_median(points: &[Vec3]) -> Vec3 {
    let mut axis: Vec<f64> = Vec::with_capacity(points.len());
    Vec3::from_fn(|a, _| {
        axis.clear();
        axis.extend(points.iter().map(|p| p[a]));
        nearest_rank(&mut axis, 50.0)
    })
}

/// Distances from the coordinate-wise median, and the ones surviving the
/// `factor × median distance` cut.
pub fn centered_distances(points: &[Vec3], factor: f64) -> (Vec<f64>, Vec<f64>) {
    let c = coordinate_median(points);
    let all: Vec<f64> = points.iter().map(|p| (p - c).norm()).collect();
    let mut scratch = all.clone();
    let median = nearest_rank(&mut scratch, 50.0);
    let kept = all.iter().copied().filter(|&d| d <= factor * median).collect();
    (all, kept)
}

pub fn robust_radius(cloud: &PointCloud, params: &ScaleParams) -> Result<f64, RegistrationError> {
    if cloud.len() < MIN_POINTS {
        return Err(RegistrationError::TooFewPoints {
            needed: MIN_POINTS,
            found: cloud.len(),
        });
    }
    let (_, mut kept) = centered_distances(&cloud.positions, params.outlier_factor);
    if kept.is_empty() {
        return Err(RegistrationError::Degenerate("robust radius is zero"));
    }
    let r = match params.radius {
        RadiusMode::Percentile { percentile } => nearest_rank(&mut kept, percentile),
        RadiusMode::MaxDistance => kept.iter().copied().fold(0.0, f64::max),
    };
    if !(r > 0.0 && r.is_finite()) {
        return Err(RegistrationError::Degenerate("robust radius is zero"));
    }
    Ok(r)
}

/// Ratio of robust radii, `target / source`.
pub fn estimate_scale(
    source: &PointCloud,
    target: &PointCloud,
    params: &ScaleParams,
) -> Result<f64, RegistrationError> {
    Ok(robust_radius(target, params)? / robust_radius(source, params)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn blob(rng: &mut ChaCha8Rng, n: usize) -> PointCloud {
        PointCloud::from_positions(
            (0..n)
                .map(|_| {
                    Vec3::new(
                        rng.random_range(-3.0..3.0),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(0.0..0.5),
                    )
                })
                .collect(),
        )
    }

    #[test]
    fn nearest_rank_definition() {
        let mut v = vec![15.0, 20.0, 35.0, 40.0, 50.0];
        assert_eq!(nearest_rank(&mut v, 5.0), 15.0);
        assert_eq!(nearest_rank(&mut v, 30.0), 20.0);
        assert_eq!(nearest_rank(&mut v, 40.0), 20.0);
        assert_eq!(nearest_rank(&mut v, 50.0), 35.0);
        assert_eq!(nearest_rank(&mut v, 100.0), 50.0);
        assert_eq!(nearest_rank(&mut v, 0.0), 15.0);
    }

    #[test]
    fn exact_scale_and_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let src = blob(&mut rng, 2000);
        let tgt = src.map_positions(|p| p * 2.0);
        let p = ScaleParams::default();
        assert!((estimate_scale(&src, &tgt, &p).unwrap() - 2.0).abs() < 1e-9);
        assert!((estimate_scale(&src, &src, &p).unwrap() - 1.0).abs() < 1e-9);
        let max = ScaleParams {
            radius: RadiusMode::MaxDistance,
            ..p
        };
        assert!((estimate_scale(&src, &tgt, &max).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn far_outliers_do_not_move_the_estimate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let clean = blob(&mut rng, 4000);
        let target = clean.map_positions(|p| p * 3.0);
        let r0 = robust_radius(&clean, &ScaleParams::default()).unwrap();
        let mut noisy = clean.clone();
        for i in 0..200 {
            let dir = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
            .normalize();
            noisy.positions[i * 20] = dir * 100.0 * r0;
        }
        let s = estimate_scale(&noisy, &target, &ScaleParams::default()).unwrap();
        assert!((s - 3.0).abs() < 0.03, "scale {s}");
    }

    #[test]
    fn degenerate_and_small_clouds() {
        let same = PointCloud::from_positions(vec![Vec3::new(1.0, 1.0, 1.0); 20]);
        assert!(matches!(
            robust_radius(&same, &ScaleParams::default()),
            Err(RegistrationError::Degenerate(_))
        ));
        let few = PointCloud::from_positions(vec![Vec3::zeros(); 9]);
        assert!(matches!(
            robust_radius(&few, &ScaleParams::default()),
            Err(RegistrationError::TooFewPoints { .. })
        ));
    }
}
