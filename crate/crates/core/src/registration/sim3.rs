use nalgebra::{Matrix4, Quaternion, UnitQuaternion};
use serde::{Deserialize, Serialize};

use crate::cloud::{PointCloud, Vec3};

use super::RegistrationError;

/// Similarity transform `x' = s·R·x + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sim3 {
    pub scale: f64,
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vec3,
}

impl Default for Sim3 {
    fn default() -> Self {
        Self::identity()
    }
}

impl Sim3 {
    pub fn identity() -> Self {
        Sim3 {
            scale: 1.0,
            rotation: UnitQuaternion::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn new(scale: f64, rotation: UnitQuaternion<f64>, translation: Vec3) -> Result<Self, RegistrationError> {
        let t = Sim3 {
            scale,
            rotation,
            translation,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn from_scale(scale: f64) -> Self {
        Sim3 {
            scale,
            ..Self::identity()
        }
    }

    pub fn rigid(rotation: UnitQuaternion<f64>, translation: Vec3) -> Self {
        Sim3 {
            scale: 1.0,
            rotation,
            translation,
        }
    }

    pub fn validate(&self) -> Result<(), RegistrationError> {
        let q = self.rotation.quaternion();
        let finite = self.scale.is_finite()
            && q.coords.iter().all(|c| c.is_finite())
            && self.translation.iter().all(|c| c.is_finite());
        if !finite {
            return Err(RegistrationError::NonFinite("transform"));
        }
        if self.scale <= 0.0 {
            return Err(RegistrationError::InvalidScale(self.scale));
        }
        Ok(())
    }

    #[inline]
    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.rotation * p * self.scale + self.translation
    }

    pub fn apply_cloud(&self, cloud: &PointCloud) -> PointCloud {
        cloud.map_positions(|p| self.apply(p))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Sim3) -> Sim3 {
        let mut rotation = self.rotation * other.rotation;
        rotation.renormalize();
        Sim3 {
            scale: self.scale * other.scale,
            rotation,
            translation: self.rotation * other.translation * self.scale + self.translation,
        }
    }

    pub fn inverse(&self) -> Sim3 {
        let rinv = self.rotation.inverse();
        let sinv = 1.0 / self.scale;
        Sim3 {
            scale: sinv,
            rotation: rinv,
            translation: -(rinv * self.translation) * sinv,
        }
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        let r = self.rotation.to_rotation_matrix();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&(r.matrix() * self.scale));
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    /// Rotation angle of `self.rotation⁻¹ · other.rotation`, in degrees.
    pub fn rotation_error_deg(&self, other: &Sim3) -> f64 {
        self.rotation.angle_to(&other.rotation).to_degrees()
    }

    pub fn to_json(&self) -> TransformJson {
        let q = self.rotation.quaternion();
        let m = self.to_matrix();
        TransformJson {
            schema: 1,
            scale: self.scale,
            quaternion: [q.w, q.i, q.j, q.k],
            translation: [self.translation.x, self.translation.y, self.translation.z],
            matrix: std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)])),
        }
    }

    pub fn from_json(json: &TransformJson) -> Result<Self, RegistrationError> {
        let [w, x, y, z] = json.quaternion;
        let q = Quaternion::new(w, x, y, z);
        let norm = q.norm();
        if !(norm.is_finite() && (norm - 1.0).abs() <= 1e-6) {
            return Err(RegistrationError::NonFinite("quaternion (not unit)"));
        }
        Sim3::new(
            json.scale,
            UnitQuaternion::from_quaternion(q),
            Vec3::from(json.translation),
        )
    }
}

/// On-disk transform: scalar-first quaternion, plus the row-major 4×4
/// matrix for tools that prefer it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformJson {
    pub schema: u32,
    pub scale: f64,
    pub quaternion: [f64; 4],
    pub translation: [f64; 3],
    pub matrix: [[f64; 4]; 4],
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_sim3() -> impl Strategy<Value = Sim3> {
        (
            -3.0f64..3.0,
            prop::array::uniform3(-1.0f64..1.0),
            0.0f64..std::f64::consts::PI,
            prop::array::uniform3(-100.0f64..100.0),
        )
            .prop_filter_map("axis", |(log_s, axis, angle, t)| {
                let axis = Vec3::from(axis);
                let unit = nalgebra::Unit::try_new(axis, 1e-3)?;
                Some(Sim3 {
                    scale: log_s.exp(),
                    rotation: UnitQuaternion::from_axis_angle(&unit, angle),
                    translation: Vec3::from(t),
                })
            })
    }

    fn close(a: &Vec3, b: &Vec3) -> bool {
        (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
    }

    proptest! {
        #[test]
        fn compose_is_sequential_application(a in arb_sim3(), b in arb_sim3(), p in prop::array::uniform3(-10.0f64..10.0)) {
            let p = Vec3::from(p);
            prop_assert!(close(&a.compose(&b).apply(&p), &a.apply(&b.apply(&p))));
            let q = a.compose(&b).rotation.quaternion().norm();
            prop_assert!((q - 1.0).abs() < 1e-9);
        }

        #[test]
        fn inverse_cancels(a in arb_sim3(), p in prop::array::uniform3(-10.0f64..10.0)) {
            let p = Vec3::from(p);
            let id = a.inverse().compose(&a);
            prop_assert!((id.scale - 1.0).abs() < 1e-9);
            prop_assert!(id.rotation.angle() < 1e-9);
            prop_assert!(close(&id.apply(&p), &p));
            prop_assert!(close(&a.compose(&a.inverse()).apply(&p), &p));
        }

        #[test]
        fn matrix_agrees_with_apply(a in arb_sim3(), p in prop::array::uniform3(-10.0f64..10.0)) {
            let p = Vec3::from(p);
            let h = a.to_matrix() * nalgebra::Vector4::new(p.x, p.y, p.z, 1.0);
            prop_assert!(close(&Vec3::new(h.x, h.y, h.z), &a.apply(&p)));
        }
    }

    #[test]
    fn json_round_trip() {
        let t = Sim3 {
            scale: 0.01,
            rotation: UnitQuaternion::from_euler_angles(0.1, -0.2, 0.3),
            translation: Vec3::new(1.0, 2.0, 3.0),
        };
        let back = Sim3::from_json(&t.to_json()).unwrap();
        assert_eq!(back.scale, t.scale);
        assert_eq!(back.translation, t.translation);
        assert!(back.rotation.angle_to(&t.rotation) < 1e-15);
    }

    #[test]
    fn invalid_scale_rejected() {
        assert!(Sim3::new(0.0, UnitQuaternion::identity(), Vec3::zeros()).is_err());
        assert!(Sim3::new(f64::NAN, UnitQuaternion::identity(), Vec3::zeros()).is_err());
    }
}
