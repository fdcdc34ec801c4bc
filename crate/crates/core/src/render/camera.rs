use nalgebra::{Quaternion, UnitQuaternion};

use crate::cloud::Vec3;
use crate::io::colmap::{Camera, Image};

use super::RenderError;

/// Undistorted pinhole camera with a world→camera pose. Camera space looks
/// down `+z` with `+y` pointing down the image.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PinholeCamera {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vec3,
}

impl PinholeCamera {
    pub fn new(
        (fx, fy, cx, cy): (f64, f64, f64, f64),
        (width, height): (usize, usize),
        rotation: UnitQuaternion<f64>,
        translation: Vec3,
    ) -> Result<Self, RenderError> {
        let cam = PinholeCamera {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
            rotation,
            translation,
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        let bad = |m: String| Err(RenderError::InvalidCamera(m));
        if !(self.fx > 0.0 && self.fy > 0.0 && self.fx.is_finite() && self.fy.is_finite()) {
            return bad(format!("focal lengths ({}, {}) must be positive", self.fx, self.fy));
        }
        if self.width == 0 || self.height == 0 {
            return bad(format!("empty resolution {}x{}", self.width, self.height));
        }
        if !((0.0..=self.width as f64).contains(&self.cx) && (0.0..=self.height as f64).contains(&self.cy)) {
            return bad(format!(
                "principal point ({}, {}) outside the {}x{} frame",
                self.cx, self.cy, self.width, self.height
            ));
        }
        if self.translation.iter().any(|v| !v.is_finite()) {
            return bad("non-finite translation".into());
        }
        Ok(())
    }

    /// Camera for a registered COLMAP image. Distortion parameters are
    /// ignored.
    pub fn from_colmap(camera: &Camera, image: &Image) -> Result<Self, RenderError> {
        let [w, x, y, z] = image.qvec;
        let q = Quaternion::new(w, x, y, z);
        if !(q.norm() > 0.0) {
            return Err(RenderError::InvalidCamera(format!(
                "image {} has a zero quaternion",
                image.id
            )));
        }
        let width = usize::try_from(camera.width)
            .map_err(|_| RenderError::InvalidCamera(format!("width {} too large", camera.width)))?;
        let height = usize::try_from(camera.height)
            .map_err(|_| RenderError::InvalidCamera(format!("height {} too large", camera.height)))?;
        PinholeCamera::new(
            camera.pinhole_intrinsics(),
            (width, height),
            UnitQuaternion::from_quaternion(q),
            Vec3::from(image.tvec),
        )
    }

    pub fn world_to_camera(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    /// Optical center in world coordinates.
    pub fn center(&self) -> Vec3 {
        -(self.rotation.inverse() * self.translation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::colmap::CameraModel;

    #[test]
    fn validation() {
        let q = UnitQuaternion::identity();
        assert!(PinholeCamera::new((100.0, 100.0, 50.0, 50.0), (100, 100), q, Vec3::zeros()).is_ok());
        assert!(PinholeCamera::new((0.0, 100.0, 50.0, 50.0), (100, 100), q, Vec3::zeros()).is_err());
        assert!(PinholeCamera::new((100.0, 100.0, 150.0, 50.0), (100, 100), q, Vec3::zeros()).is_err());
        assert!(PinholeCamera::new((100.0, 100.0, 50.0, 50.0), (0, 100), q, Vec3::zeros()).is_err());
    }

    #[test]
    fn from_colmap_pose() {
        let cam = Camera {
            id: 1,
            model: CameraModel::SimpleRadial,
            width: 64,
            height: 48,
            params: vec![50.0, 32.0, 24.0, 0.01],
        };
        let img = Image {
            id: 7,
            qvec: [0.0, 0.0, 1.0, 0.0],
            tvec: [1.0, 2.0, 3.0],
            camera_id: 1,
            name: "a.png".into(),
            keypoints: vec![],
        };
        let pc = PinholeCamera::from_colmap(&cam, &img).unwrap();
        assert_eq!((pc.fx, pc.fy, pc.cx, pc.cy), (50.0, 50.0, 32.0, 24.0));
        let c = pc.center();
        assert!(pc.world_to_camera(&c).norm() < 1e-12);
        // 180° about y flips x and z.
        assert!((pc.world_to_camera(&Vec3::new(1.0, 0.0, 0.0)) - Vec3::new(0.0, 2.0, 3.0)).norm() < 1e-12);
    }
}
