use nalgebra::{Quaternion, UnitQuaternion};

use crate::cloud::Vec3;
use crate::io::splat_ply::SplatRecord;

use super::covariance::{build_covariance, unit_rotation, Covariance3};
use super::sh::{sh_degree, sh_to_color};
use super::GaussianError;

/// An activated splat. Covariance is always derived from `scales` and
/// `rotation`, never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSplat {
    pub mean: Vec3,
    /// Standard deviations along the rotated axes.
    pub scales: Vec3,
    pub rotation: UnitQuaternion<f64>,
    pub opacity: f64,
    /// `(d+1)²` RGB triples; index 0 is band 0.
    pub sh: Vec<[f64; 3]>,
}

/// Opacities map to finite logits only inside this margin of `[0, 1]`.
const OPACITY_MARGIN: f64 = 1e-7;

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(OPACITY_MARGIN, 1.0 - OPACITY_MARGIN);
    (p / (1.0 - p)).ln()
}

/// Splat files store raw, unnormalized rotation parameters; any finite
/// nonzero quaternion is a valid rotation.
fn file_rotation(q: Quaternion<f64>) -> Result<UnitQuaternion<f64>, GaussianError> {
    let n = q.norm();
    if !(n > 1e-12 && n.is_finite()) {
        return Err(GaussianError::BadQuaternion(n));
    }
    unit_rotation(q / n)
}

impl GaussianSplat {
    pub fn new(
        mean: Vec3,
        scales: Vec3,
        rotation: UnitQuaternion<f64>,
        opacity: f64,
        sh: Vec<[f64; 3]>,
    ) -> Result<Self, GaussianError> {
        let splat = GaussianSplat {
            mean,
            scales,
            rotation,
            opacity,
            sh,
        };
        splat.validate()?;
        Ok(splat)
    }

    pub fn validate(&self) -> Result<(), GaussianError> {
        if let Some(&s) = self.scales.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(GaussianError::NonPositiveScale(s));
        }
        if !(0.0..=1.0).contains(&self.opacity) {
            return Err(GaussianError::BadOpacity(self.opacity));
        }
        if self.mean.iter().any(|v| !v.is_finite()) {
            return Err(GaussianError::NonFinite);
        }
        sh_degree(self.sh.len())?;
        Ok(())
    }

    pub fn from_record(r: &SplatRecord) -> Result<Self, GaussianError> {
        let degree = r
            .sh_degree()
            .ok_or(GaussianError::MalformedShCount(3 + r.f_rest.len()))?;
        let per_channel = r.f_rest.len() / 3;
        let mut sh = Vec::with_capacity((degree + 1) * (degree + 1));
        sh.push(r.f_dc.map(f64::from));
        for k in 0..per_channel {
            sh.push([0, 1, 2].map(|c| r.f_rest[c * per_channel + k] as f64));
        }
        let [w, x, y, z] = r.rotation.map(f64::from);
        GaussianSplat::new(
            Vec3::from(r.mean.map(f64::from)),
            Vec3::from(r.log_scales.map(|s| (s as f64).exp())),
            file_rotation(Quaternion::new(w, x, y, z))?,
            sigmoid(r.opacity_logit as f64),
            sh,
        )
    }

    pub fn to_record(&self) -> SplatRecord {
        let per_channel = self.sh.len() - 1;
        let mut f_rest = vec![0.0f32; 3 * per_channel];
        for (k, coeff) in self.sh[1..].iter().enumerate() {
            for c in 0..3 {
                f_rest[c * per_channel + k] = coeff[c] as f32;
            }
        }
        let q = self.rotation.quaternion();
        SplatRecord {
            mean: [self.mean.x as f32, self.mean.y as f32, self.mean.z as f32],
            f_dc: self.sh[0].map(|v| v as f32),
            f_rest,
            opacity_logit: logit(self.opacity) as f32,
            log_scales: [0, 1, 2].map(|i| self.scales[i].ln() as f32),
            rotation: [q.w as f32, q.i as f32, q.j as f32, q.k as f32],
        }
    }

    pub fn covariance(&self) -> Covariance3 {
        build_covariance(&self.scales, self.rotation.quaternion()).expect("validated splat has a valid covariance")
    }

    pub fn color(&self, view_dir: &Vec3) -> Result<[f64; 3], GaussianError> {
        sh_to_color(&self.sh, view_dir)
    }

    /// Color seen from the canonical `+z` direction, rounded to 8 bits.
    pub fn canonical_color_u8(&self) -> [u8; 3] {
        self.color(&Vec3::z())
            .expect("validated splat has a valid SH count")
            .map(|c| (c * 255.0).round() as u8)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> SplatRecord {
        SplatRecord {
            mean: [1.0, -2.0, 0.5],
            f_dc: [0.1, 0.2, 0.3],
            f_rest: (0..9).map(|i| i as f32 * 0.01).collect(),
            opacity_logit: 0.7,
            log_scales: [-1.0, -2.0, 0.1],
            rotation: [0.9, 0.1, -0.3, 0.2],
        }
    }

    #[test]
    fn activation() {
        let s = GaussianSplat::from_record(&record()).unwrap();
        assert!((s.opacity - 1.0 / (1.0 + (-0.7f64).exp())).abs() < 1e-7);
        assert!((s.scales.x - (-1.0f64).exp()).abs() < 1e-7);
        let q = s.rotation.quaternion();
        assert!((q.w - 0.9 / 0.9746794168993874).abs() < 1e-7);
        // Channel-major on disk: red of coefficient 2 is f_rest[1].
        assert_eq!(s.sh[2][0], 0.01f32 as f64);
        assert_eq!(s.sh[2][1], 0.04f32 as f64);
        assert_eq!(s.sh.len(), 4);
    }

    #[test]
    fn record_round_trip_is_close() {
        let mut r = record();
        let q = nalgebra::Quaternion::new(0.9f64, 0.1, -0.3, 0.2).normalize();
        r.rotation = [q.w as f32, q.i as f32, q.j as f32, q.k as f32];
        let back = GaussianSplat::from_record(&r).unwrap().to_record();
        assert_eq!(back.f_rest, r.f_rest);
        assert_eq!(back.f_dc, r.f_dc);
        for i in 0..3 {
            assert!((back.log_scales[i] - r.log_scales[i]).abs() < 1e-6);
        }
        assert!((back.opacity_logit - r.opacity_logit).abs() < 1e-5);
        for i in 0..4 {
            assert!((back.rotation[i] - r.rotation[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_bad_records() {
        let mut r = record();
        r.f_rest.pop();
        assert!(matches!(
            GaussianSplat::from_record(&r),
            Err(GaussianError::MalformedShCount(11))
        ));
        let mut r = record();
        r.rotation = [0.0; 4];
        assert!(matches!(
            GaussianSplat::from_record(&r),
            Err(GaussianError::BadQuaternion(_))
        ));
    }

    #[test]
    fn covariance_from_parameters() {
        let s = GaussianSplat::new(
            Vec3::zeros(),
            Vec3::new(1.0, 2.0, 3.0),
            UnitQuaternion::identity(),
            0.5,
            vec![[0.0; 3]],
        )
        .unwrap();
        assert_eq!(
            s.covariance().0,
            nalgebra::Matrix3::from_diagonal(&Vec3::new(1.0, 4.0, 9.0))
        );
        assert_eq!(s.canonical_color_u8(), [128; 3]);
    }
}
