use nalgebra::{Matrix3, Quaternion, SMatrix, SVector, UnitQuaternion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cloud::Vec3;

use super::eigen::eigen_decompose;
use super::GaussianError;

/// A symmetric positive semi-definite 3×3 covariance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Covariance3(pub Matrix3<f64>);

impl Covariance3 {
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.0 - self.0.transpose()).amax() <= tol
    }
}

/// Unbiased sample covariance (`n − 1` denominator).
pub fn sample_covariance<const D: usize>(samples: &[SVector<f64, D>]) -> Result<SMatrix<f64, D, D>, GaussianError> {
    let n = samples.len();
    if n < 2 {
        return Err(GaussianError::TooFewSamples(n));
    }
    let mean = samples.iter().sum::<SVector<f64, D>>() / n as f64;
    let mut acc = SMatrix::<f64, D, D>::zeros();
    for s in samples {
        let d = s - mean;
        acc += d * d.transpose();
    }
    Ok(acc / (n - 1) as f64)
}

/// Accepts quaternions within 1e-3 of unit norm and renormalizes them.
pub fn unit_rotation(q: Quaternion<f64>) -> Result<UnitQuaternion<f64>, GaussianError> {
    let norm = q.norm();
    if !(norm.is_finite() && (norm - 1.0).abs() <= 1e-3) {
        return Err(GaussianError::BadQuaternion(norm));
    }
    Ok(UnitQuaternion::from_quaternion(q))
}

/// `Σ = R·diag(s²)·Rᵀ`, computed as `M·Mᵀ` with `M = R·diag(s)` so the
/// result is exactly symmetric.
pub fn build_covariance(scales: &Vec3, rotation: &Quaternion<f64>) -> Result<Covariance3, GaussianError> {
    if let Some(&s) = scales.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(GaussianError::NonPositiveScale(s));
    }
    let r = unit_rotation(*rotation)?.to_rotation_matrix();
    let m = r.matrix() * Matrix3::from_diagonal(scales);
    Ok(Covariance3(m * m.transpose()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticFormReport {
    pub trials: usize,
    pub min_observed: f64,
    pub max_observed: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub violations: usize,
}

/// Samples unit vectors `y` and checks `λ_min − ε ≤ yᵀΣy ≤ λ_max + ε`
/// with `ε = 1e-9·λ_max`.
pub fn quadratic_form_bound_check(
    sigma: &Matrix3<f64>,
    trials: usize,
    seed: u64,
) -> Result<QuadraticFormReport, GaussianError> {
    let eig = eigen_decompose(sigma)?;
    let (hi, lo) = (eig.values[0], eig.values[2]);
    let eps = 1e-9 * hi.abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = QuadraticFormReport {
        trials,
        min_observed: f64::INFINITY,
        max_observed: f64::NEG_INFINITY,
        lambda_min: lo,
        lambda_max: hi,
        violations: 0,
    };
    let mut done = 0;
    while done < trials {
        let v = Vec3::from_fn(|_, _| StandardNormal.sample(&mut rng));
        let norm = v.norm();
        if norm < 1e-12 {
            continue;
        }
        let y = v / norm;
        let q = y.dot(&(sigma * y));
        report.min_observed = report.min_observed.min(q);
        report.max_observed = report.max_observed.max(q);
        if q < lo - eps || q > hi + eps {
            report.violations += 1;
        }
        done += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Vector2, Vector3};

    #[test]
    fn two_point_covariance() {
        let s = [Vector2::new(0.0, 0.0), Vector2::new(2.0, 2.0)];
        let c = sample_covariance(&s).unwrap();
        assert_eq!(c, nalgebra::Matrix2::new(2.0, 2.0, 2.0, 2.0));
    }

    #[test]
    fn identical_samples_zero_covariance() {
        let s = vec![Vector3::new(1.5, -2.0, 3.0); 10];
        assert_eq!(sample_covariance(&s).unwrap(), Matrix3::zeros());
        assert!(matches!(
            sample_covariance(&s[..1]),
            Err(GaussianError::TooFewSamples(1))
        ));
    }

    #[test]
    fn estimate_converges_to_known_covariance() {
        // Samples L·z with z standard normal have covariance L·Lᵀ.
        let l = Matrix3::new(1.0, 0.0, 0.0, 0.5, 2.0, 0.0, -0.3, 0.2, 0.7);
        let truth = l * l.transpose();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let samples: Vec<Vector3<f64>> = (0..1000)
            .map(|_| l * Vector3::from_fn(|_, _| StandardNormal.sample(&mut rng)))
            .collect();
        let est = sample_covariance(&samples).unwrap();
        let rel = (est - truth).norm() / truth.norm();
        assert!(rel < 0.1, "relative Frobenius error {rel}");
    }

    #[test]
    fn axis_aligned_and_isotropic() {
        let c = build_covariance(&Vec3::new(1.0, 2.0, 3.0), &Quaternion::identity()).unwrap();
        assert_eq!(c.0, Matrix3::from_diagonal(&Vec3::new(1.0, 4.0, 9.0)));
        let q = UnitQuaternion::from_euler_angles(0.3, 1.2, -2.0).into_inner();
        let iso = build_covariance(&Vec3::repeat(0.5), &q).unwrap();
        assert!((iso.0 - Matrix3::identity() * 0.25).amax() < 1e-15);
        assert!(iso.is_symmetric(0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let q = Quaternion::identity();
        assert!(matches!(
            build_covariance(&Vec3::new(1.0, 0.0, 1.0), &q),
            Err(GaussianError::NonPositiveScale(_))
        ));
        assert!(matches!(
            build_covariance(&Vec3::repeat(1.0), &Quaternion::new(1.1, 0.0, 0.0, 0.0)),
            Err(GaussianError::BadQuaternion(_))
        ));
        // Slightly off unit norm is renormalized.
        assert!(build_covariance(&Vec3::repeat(1.0), &Quaternion::new(1.0005, 0.0, 0.0, 0.0)).is_ok());
    }

    #[test]
    fn identity_quadratic_form() {
        let r = quadratic_form_bound_check(&Matrix3::identity(), 1000, 1).unwrap();
        assert_eq!(r.violations, 0);
        assert!((r.min_observed - 1.0).abs() < 1e-15 && (r.max_observed - 1.0).abs() < 1e-15);
    }

    #[test]
    fn extremal_direction_attains_lambda_max() {
        let s = Matrix3::from_diagonal(&Vec3::new(1.0, 4.0, 9.0));
        let e3 = Vec3::z();
        assert_eq!(e3.dot(&(s * e3)), 9.0);
        let r = quadratic_form_bound_check(&s, 10_000, 2).unwrap();
        assert_eq!(r.lambda_max, 9.0);
        assert_eq!(r.violations, 0);
        assert!(r.max_observed <= 9.0 && r.min_observed >= 1.0);
    }
}
