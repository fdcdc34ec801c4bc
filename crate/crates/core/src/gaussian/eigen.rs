//! Symmetric 3×3 eigendecomposition.
//!
//! The trigonometric closed form handles well-separated spectra; when two
//! eigenvalues nearly coincide (relative gap below 1e-6) or the analytic
//! vectors leave a large residual, cyclic Jacobi takes over.

use nalgebra::{Matrix3, Vector3};

use super::GaussianError;

const GAP_TOLERANCE: f64 = 1e-6;
const RESIDUAL_TOLERANCE: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenDecomposition {
    /// Descending.
    pub values: Vector3<f64>,
    /// Column `i` pairs with `values[i]`.
    pub vectors: Matrix3<f64>,
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> Matrix3<f64> {
        self.vectors * Matrix3::from_diagonal(&self.values) * self.vectors.transpose()
    }

    /// Eigenvalues with roundoff negatives clamped to zero.
    pub fn clamped_values(&self) -> Vector3<f64> {
        self.values.map(|v| v.max(0.0))
    }
}

pub fn eigen_decompose(a: &Matrix3<f64>) -> Result<EigenDecomposition, GaussianError> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(GaussianError::NonFinite);
    }
    let amax = a.amax();
    if (a - a.transpose()).amax() > 1e-9 * amax {
        return Err(GaussianError::NotSymmetric);
    }
    let sym = (a + a.transpose()) * 0.5;
    if amax == 0.0 {
        return Ok(finish(Vector3::zeros(), Matrix3::identity()));
    }
    let (values, vectors) = analytic(&sym).unwrap_or_else(|| jacobi(&sym));
    Ok(finish(values, vectors))
}

fn analytic(a: &Matrix3<f64>) -> Option<(Vector3<f64>, Matrix3<f64>)> {
    let p1 = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
    if p1 == 0.0 {
        return Some((a.diagonal(), Matrix3::identity()));
    }
    let q = a.trace() / 3.0;
    let p2 = (a[(0, 0)] - q).powi(2) + (a[(1, 1)] - q).powi(2) + (a[(2, 2)] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = (a - Matrix3::identity() * q) / p;
    let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let l2 = 3.0 * q - l1 - l3;

    let scale = l1.abs().max(l3.abs());
    if (l1 - l2).min(l2 - l3) <= GAP_TOLERANCE * scale {
        return None;
    }
    let v1 = null_vector(&(a - Matrix3::identity() * l1))?;
    let v3 = null_vector(&(a - Matrix3::identity() * l3))?;
    let v3 = (v3 - v1 * v1.dot(&v3)).try_normalize(0.0)?;
    let v2 = v3.cross(&v1);
    let vectors = Matrix3::from_columns(&[v1, v2, v3]);
    let values = Vector3::from_fn(|i, _| {
        let v = vectors.column(i);
        v.dot(&(a * v))
    });
    let residual = (a * vectors - vectors * Matrix3::from_diagonal(&values)).amax();
    if residual > RESIDUAL_TOLERANCE * scale {
        return None;
    }
    Some((values, vectors))
}

/// Unit vector spanning the null space of a rank-2 matrix, from the
/// largest cross product of its rows.
fn null_vector(m: &Matrix3<f64>) -> Option<Vector3<f64>> {
    let r0 = m.row(0).transpose();
    let r1 = m.row(1).transpose();
    let r2 = m.row(2).transpose();
    [r0.cross(&r1), r0.cross(&r2), r1.cross(&r2)]
        .into_iter()
        .max_by(|a, b| a.norm_squared().total_cmp(&b.norm_squared()))
        .and_then(|c| c.try_normalize(0.0))
}

fn jacobi(a: &Matrix3<f64>) -> (Vector3<f64>, Matrix3<f64>) {
    let mut m = *a;
    let mut v = Matrix3::identity();
    let norm = a.norm();
    for _ in 0..64 {
        let off = m[(0, 1)].powi(2) + m[(0, 2)].powi(2) + m[(1, 2)].powi(2);
        if off.sqrt() <= f64::EPSILON * 1e-3 * norm {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = m[(p, q)];
            if apq == 0.0 {
                continue;
            }
            let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut rot = Matrix3::identity();
            rot[(p, p)] = c;
            rot[(q, q)] = c;
            rot[(p, q)] = s;
            rot[(q, p)] = -s;
            m = rot.transpose() * m * rot;
            m[(p, q)] = 0.0;
            m[(q, p)] = 0.0;
            v *= rot;
        }
    }
    (m.diagonal(), v)
}

fn finish(values: Vector3<f64>, vectors: Matrix3<f64>) -> EigenDecomposition {
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let mut out_values = Vector3::zeros();
    let mut out_vectors = Matrix3::zeros();
    for (k, &i) in order.iter().enumerate() {
        let mut col = vectors.column(i).into_owned();
        let lead = col
            .iter()
            .enumerate()
            .fold(0, |best, (j, x)| if x.abs() > col[best].abs() { j } else { best });
        if col[lead] < 0.0 {
            col = -col;
        }
        out_values[k] = values[i];
        out_vectors.set_column(k, &col);
    }
    EigenDecomposition {
        values: out_values,
        vectors: out_vectors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::build_covariance;
    use nalgebra::{Quaternion, UnitQuaternion};
    use proptest::prelude::*;

    fn check_decomposition(a: &Matrix3<f64>, e: &EigenDecomposition) {
        let scale = a.amax().max(1e-300);
        assert!((e.reconstruct() - a).amax() <= 1e-9 * scale, "reconstruction");
        assert!((e.vectors.transpose() * e.vectors - Matrix3::identity()).amax() <= 1e-9);
        assert!(e.values[0] >= e.values[1] && e.values[1] >= e.values[2]);
    }

    #[test]
    fn diagonal_matrix() {
        let a = Matrix3::from_diagonal(&Vector3::new(1.0, 4.0, 9.0));
        let e = eigen_decompose(&a).unwrap();
        assert_eq!(e.values, Vector3::new(9.0, 4.0, 1.0));
        assert_eq!(
            e.vectors,
            Matrix3::from_columns(&[Vector3::z(), Vector3::y(), Vector3::x()])
        );
    }

    #[test]
    fn rank_one() {
        let v = Vector3::new(1.0, -2.0, 0.5);
        let a = v * v.transpose();
        let e = eigen_decompose(&a).unwrap();
        assert!((e.values[0] - v.norm_squared()).abs() < 1e-12);
        assert!(e.values[1].abs() < 1e-12 && e.values[2].abs() < 1e-12);
        assert!((e.vectors.column(0).dot(&v.normalize()).abs() - 1.0).abs() < 1e-12);
        check_decomposition(&a, &e);
    }

    #[test]
    fn nearly_degenerate_uses_fallback() {
        let q = UnitQuaternion::from_euler_angles(0.4, -0.7, 1.1);
        let r = q.to_rotation_matrix();
        let a = r.matrix() * Matrix3::from_diagonal(&Vector3::new(2.0, 2.0 + 1e-9, 0.5)) * r.matrix().transpose();
        let e = eigen_decompose(&a).unwrap();
        check_decomposition(&a, &e);
        assert!((e.values[0] - (2.0 + 1e-9)).abs() < 1e-12);
        assert!((e.values[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sign_convention() {
        let a = Matrix3::new(2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0);
        let e = eigen_decompose(&a).unwrap();
        for c in e.vectors.column_iter() {
            let lead = c.iamax();
            assert!(c[lead] > 0.0);
        }
        check_decomposition(&a, &e);
    }

    #[test]
    fn rejects_asymmetric() {
        let a = Matrix3::new(1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(eigen_decompose(&a), Err(GaussianError::NotSymmetric)));
        assert!(matches!(
            eigen_decompose(&Matrix3::from_element(f64::NAN)),
            Err(GaussianError::NonFinite)
        ));
    }

    #[test]
    fn zero_matrix() {
        let e = eigen_decompose(&Matrix3::zeros()).unwrap();
        assert_eq!(e.values, Vector3::zeros());
    }

    fn rotation() -> impl Strategy<Value = Quaternion<f64>> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("non-degenerate", |(w, x, y, z)| w * w + x * x + y * y + z * z > 0.01)
            .prop_map(|(w, x, y, z)| Quaternion::new(w, x, y, z).normalize())
    }

    proptest! {
        #[test]
        fn eigenvalues_are_squared_scales(
            s in prop::array::uniform3(0.01..10.0f64),
            q in rotation(),
        ) {
            let scales = Vector3::from(s);
            let cov = build_covariance(&scales, &q).unwrap();
            prop_assert!(cov.is_symmetric(1e-12 * cov.0.amax()));
            let e = eigen_decompose(&cov.0).unwrap();
            let mut sq: Vec<f64> = s.iter().map(|v| v * v).collect();
            sq.sort_by(|a, b| b.total_cmp(a));
            for i in 0..3 {
                prop_assert!((e.values[i] - sq[i]).abs() <= 1e-9 * sq[0], "{} vs {}", e.values[i], sq[i]);
            }
            prop_assert!(e.values[2] >= -1e-9 * sq[0]);
            check_decomposition(&cov.0, &e);
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        let x = e.vectors.column(i).dot(&(cov.0 * e.vectors.column(j)));
                        prop_assert!(x.abs() <= 1e-9 * e.values[0]);
                    }
                }
            }
        }

        #[test]
        fn major_axis_matches_largest_scale(
            s in prop::array::uniform3(0.01..10.0f64),
            q in rotation(),
        ) {
            let mut sorted = s;
            sorted.sort_by(|a, b| b.total_cmp(a));
            prop_assume!(sorted[0] - sorted[1] > 1e-3 * sorted[0]);
            let scales = Vector3::from(s);
            let cov = build_covariance(&scales, &q).unwrap();
            let e = eigen_decompose(&cov.0).unwrap();
            let big = scales.iamax();
            let axis = UnitQuaternion::from_quaternion(q).to_rotation_matrix().matrix().column(big).into_owned();
            prop_assert!(e.vectors.column(0).dot(&axis).abs() >= 1.0 - 1e-9);
        }
    }
}
