//! Univariate and multivariate normal densities.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::GaussianError;

pub fn gaussian_pdf_1d(x: f64, mu: f64, sigma2: f64) -> Result<f64, GaussianError> {
    if !(sigma2 > 0.0) {
        return Err(GaussianError::NonPositiveVariance(sigma2));
    }
    let d = x - mu;
    Ok((-(d * d) / (2.0 * sigma2)).exp() / (2.0 * PI * sigma2).sqrt())
}

/// `ln p(y | θ, Σ)` through a Cholesky factor of `Σ`; no explicit inverse.
pub fn gaussian_log_pdf_nd(y: &DVector<f64>, theta: &DVector<f64>, sigma: &DMatrix<f64>) -> Result<f64, GaussianError> {
    let k = y.len();
    if theta.len() != k || sigma.nrows() != k || sigma.ncols() != k {
        return Err(GaussianError::DimensionMismatch {
            point: k,
            mean: theta.len(),
            covariance: (sigma.nrows(), sigma.ncols()),
        });
    }
    let tol = 1e-12 * sigma.amax().max(f64::MIN_POSITIVE);
    if (sigma - sigma.transpose()).amax() > tol {
        return Err(GaussianError::NotSymmetric);
    }
    let chol = sigma.clone().cholesky().ok_or(GaussianError::Singular)?;
    let l = chol.l_dirty();
    let mut log_det = 0.0;
    for i in 0..k {
        let d = l[(i, i)];
        if !(d > 0.0) {
            return Err(GaussianError::Singular);
        }
        log_det += 2.0 * d.ln();
    }
    let z = l.solve_lower_triangular(&(y - theta)).ok_or(GaussianError::Singular)?;
    let maha = z.norm_squared();
    Ok(-0.5 * (k as f64 * (2.0 * PI).ln() + log_det + maha))
}

pub fn gaussian_pdf_nd(y: &DVector<f64>, theta: &DVector<f64>, sigma: &DMatrix<f64>) -> Result<f64, GaussianError> {
    gaussian_log_pdf_nd(y, theta, sigma).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_normal_peak() {
        assert!((gaussian_pdf_1d(0.0, 0.0, 1.0).unwrap() - 0.3989422804014327).abs() < 1e-15);
        for s2 in [0.01, 0.5, 3.0, 100.0] {
            let v = gaussian_pdf_1d(2.5, 2.5, s2).unwrap();
            assert!((v - 1.0 / (2.0 * PI * s2).sqrt()).abs() < 1e-15 * v.max(1.0));
        }
    }

    #[test]
    fn off_peak_reference() {
        // exp(-1/8) / sqrt(8π), evaluated independently with mpmath at 30
        // digits: 0.176032663382149738887...
        let v = gaussian_pdf_1d(1.0, 0.0, 4.0).unwrap();
        assert!((v - 0.17603266338214973).abs() < 1e-15);
    }

    #[test]
    fn invalid_variance() {
        assert!(gaussian_pdf_1d(0.0, 0.0, 0.0).is_err());
        assert!(gaussian_pdf_1d(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn multivariate_peaks() {
        let at_mean = |k: usize| {
            let z = DVector::zeros(k);
            gaussian_pdf_nd(&z, &z, &DMatrix::identity(k, k)).unwrap()
        };
        assert!((at_mean(2) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((at_mean(3) - (2.0 * PI).powf(-1.5)).abs() < 1e-15);
    }

    #[test]
    fn multivariate_errors() {
        let y = DVector::zeros(3);
        let bad_dim = DVector::zeros(2);
        assert!(matches!(
            gaussian_pdf_nd(&y, &bad_dim, &DMatrix::identity(3, 3)),
            Err(GaussianError::DimensionMismatch { .. })
        ));
        let singular = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            gaussian_pdf_nd(&y, &y, &singular),
            Err(GaussianError::Singular)
        ));
        let asym = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.0, 2.0]);
        let y2 = DVector::zeros(2);
        assert!(matches!(
            gaussian_pdf_nd(&y2, &y2, &asym),
            Err(GaussianError::NotSymmetric)
        ));
    }

    #[test]
    fn matches_explicit_inverse() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for k in 1..=4 {
            for _ in 0..20 {
                let a = DMatrix::from_fn(k, k, |_, _| rng.random_range(-1.0..1.0));
                let sigma = a.transpose() * &a + DMatrix::identity(k, k);
                let y = DVector::from_fn(k, |_, _| rng.random_range(-2.0..2.0));
                let theta = DVector::from_fn(k, |_, _| rng.random_range(-2.0..2.0));
                let d = &y - &theta;
                let inv = sigma.clone().try_inverse().unwrap();
                let q: f64 = (d.transpose() * inv * &d)[(0, 0)];
                let direct = (-0.5 * q).exp() / ((2.0 * PI).powi(k as i32) * sigma.determinant()).sqrt();
                let v = gaussian_pdf_nd(&y, &theta, &sigma).unwrap();
                assert!((v - direct).abs() <= 1e-10 * direct, "k={k}: {v} vs {direct}");
            }
        }
    }
}
