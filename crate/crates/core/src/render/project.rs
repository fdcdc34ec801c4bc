use nalgebra::{Matrix2, Matrix2x3, Vector2};

use crate::gaussian::GaussianSplat;

use super::PinholeCamera;

/// Splats at or in front of this camera-space depth are culled.
pub const Z_NEAR: f64 = 0.01;
/// Added to the diagonal of every projected covariance, in px².
pub const LOW_PASS: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projected2DGaussian {
    pub mean: Vector2<f64>,
    pub cov: Matrix2<f64>,
    /// `cov⁻¹`.
    pub conic: Matrix2<f64>,
    pub color: [f64; 3],
    pub opacity: f64,
    pub depth: f64,
}

/// EWA projection: `Σ₂ = J·W·Σ·Wᵀ·Jᵀ + LOW_PASS·I` with `J` the
/// perspective Jacobian at the camera-space mean. `None` when culled.
pub fn project_splat(splat: &GaussianSplat, cam: &PinholeCamera, z_near: f64) -> Option<Projected2DGaussian> {
    let t = cam.world_to_camera(&splat.mean);
    if t.z <= z_near {
        return None;
    }
    let (x, y, z) = (t.x, t.y, t.z);
    let mean = Vector2::new(cam.fx * x / z + cam.cx, cam.fy * y / z + cam.cy);
    let j = Matrix2x3::new(
        cam.fx / z,
        0.0,
        -cam.fx * x / (z * z),
        0.0,
        cam.fy / z,
        -cam.fy * y / (z * z),
    );
    let w = cam.rotation.to_rotation_matrix();
    let jw = j * w.matrix();
    let sigma = splat.covariance().0;
    let mut cov = jw * sigma * jw.transpose();
    // Exact symmetry keeps the conic symmetric too.
    let off = 0.5 * (cov[(0, 1)] + cov[(1, 0)]);
    cov[(0, 1)] = off;
    cov[(1, 0)] = off;
    cov += Matrix2::identity() * LOW_PASS;
    let det = cov.determinant();
    assert!(det > 0.0, "projected covariance is singular after the low-pass floor");
    let conic = Matrix2::new(cov[(1, 1)], -off, -off, cov[(0, 0)]) / det;

    let dir = (splat.mean - cam.center()).normalize();
    let color = splat.color(&dir).expect("validated splat has a valid SH count");
    Some(Projected2DGaussian {
        mean,
        cov,
        conic,
        color,
        opacity: splat.opacity,
        depth: z,
    })
}
