#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{Unit, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use splatprior::io::colmap::{write_colmap_model, Camera, CameraModel, Image, SfmModel, SparsePoints};
use splatprior::io::ply::{write_ply, PlyFormat};
use splatprior::registration::{CorrespondenceSet, Sim3};
use splatprior::{PointCloud, Vec3};

pub struct Scene {
    pub lidar: PointCloud,
    /// Inlier LiDAR points, before outliers were appended.
    pub inliers: usize,
    pub sfm: SparsePoints,
    pub corr: CorrespondenceSet,
    pub truth: Sim3,
    /// Angle between the truth and the pose the correspondences imply.
    pub perturbation_deg: f64,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn random_rotation(rng: &mut ChaCha8Rng) -> UnitQuaternion<f64> {
    let q = nalgebra::Quaternion::new(normal(rng), normal(rng), normal(rng), normal(rng));
    UnitQuaternion::from_quaternion(q)
}

pub fn random_axis(rng: &mut ChaCha8Rng) -> Unit<Vector3<f64>> {
    Unit::new_normalize(Vector3::new(normal(rng), normal(rng), normal(rng)))
}

/// An irregular blob: anisotropic Gaussian clusters of colored points,
/// a few meters across.
pub fn blob(rng: &mut ChaCha8Rng, n: usize) -> PointCloud {
    let clusters: Vec<(Vec3, nalgebra::Matrix3<f64>, [u8; 3])> = (0..7)
        .map(|_| {
            let center = Vec3::new(
                rng.random_range(-4.0..4.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-2.0..2.0),
            );
            let r = random_rotation(rng).to_rotation_matrix().into_inner();
            let s = nalgebra::Matrix3::from_diagonal(&Vec3::new(
                rng.random_range(0.3..1.5),
                rng.random_range(0.2..1.0),
                rng.random_range(0.05..0.4),
            ));
            (center, r * s, [rng.random(), rng.random(), rng.random()])
        })
        .collect();
    let mut positions = Vec::with_capacity(n);
    let mut colors = Vec::with_capacity(n);
    for i in 0..n {
        let (c, m, col) = &clusters[i % clusters.len()];
        positions.push(c + m * Vec3::new(normal(rng), normal(rng), normal(rng)));
        colors.push(*col);
    }
    PointCloud::new(positions, colors)
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// A registration scene. The SfM cloud is the truth applied to a random
/// quarter of the inliers; the correspondences are exact under the truth
/// composed with a rotation of 3 to 5 degrees about the scan centroid.
pub fn scene(seed: u64, n: usize, scale: f64) -> Scene {
    let mut rng = rng(seed);
    let inliers = n - n * 3 / 100;
    let mut lidar = blob(&mut rng, inliers);
    let (lo, hi) = lidar.bounds().expect("non-empty");
    let pad = (hi - lo) * 0.2;
    for _ in inliers..n {
        lidar.positions.push(Vec3::new(
            rng.random_range(lo.x - pad.x..hi.x + pad.x),
            rng.random_range(lo.y - pad.y..hi.y + pad.y),
            rng.random_range(lo.z - pad.z..hi.z + pad.z),
        ));
        lidar.colors.push([rng.random(), rng.random(), rng.random()]);
    }

    let rotation = random_rotation(&mut rng);
    let translation = Vec3::new(normal(&mut rng), normal(&mut rng), normal(&mut rng)) * 10.0 * scale;
    let truth = Sim3::new(scale, rotation, translation).unwrap();

    let mut positions = Vec::new();
    let mut colors = Vec::new();
    for i in 0..inliers {
        if rng.random_bool(0.25) {
            positions.push(truth.apply(&lidar.positions[i]));
            colors.push(lidar.colors[i]);
        }
    }
    let mut sfm = SparsePoints::from_cloud(PointCloud::new(positions, colors));
    sfm.errors = (0..sfm.len()).map(|_| rng.random_range(0.1..1.5)).collect();

    let angle = rng.random_range(3.0f64..5.0).to_radians();
    let delta_r = UnitQuaternion::from_axis_angle(&random_axis(&mut rng), angle);
    let centroid = lidar.positions[..inliers].iter().sum::<Vec3>() / inliers as f64;
    let delta = Sim3::rigid(delta_r, centroid - delta_r * centroid);
    let implied = truth.compose(&delta);
    let corr = CorrespondenceSet::new((0..8).map(|_| {
        let p = lidar.positions[rng.random_range(0..inliers)];
        (p, implied.apply(&p))
    }));
    Scene {
        lidar,
        inliers,
        sfm,
        corr,
        truth,
        perturbation_deg: angle.to_degrees(),
    }
}

/// A pinhole camera `distance` in front of `target`, looking at it.
pub fn look_at(id: u32, camera_id: u32, eye: Vec3, target: Vec3, name: &str) -> Image {
    let forward = (target - eye).normalize();
    let up = if forward.y.abs() > 0.9 { Vec3::x() } else { Vec3::y() };
    let right = up.cross(&forward).normalize();
    let down = forward.cross(&right);
    // Rows are the camera axes in world coordinates.
    let r = nalgebra::Matrix3::from_rows(&[right.transpose(), down.transpose(), forward.transpose()]);
    let q = UnitQuaternion::from_matrix(&r);
    let t = -(q * eye);
    Image {
        id,
        qvec: [q.w, q.i, q.j, q.k],
        tvec: [t.x, t.y, t.z],
        camera_id,
        name: name.to_string(),
        keypoints: Vec::new(),
    }
}

/// A COLMAP model holding `points` and two cameras looking at their
/// centroid from `distance` away.
pub fn model_with_views(points: SparsePoints, distance: f64, size: (u64, u64)) -> SfmModel {
    let n = points.cloud.len().max(1) as f64;
    let centroid = points.cloud.positions.iter().sum::<Vec3>() / n;
    let mut cameras = BTreeMap::new();
    let f = size.0 as f64;
    cameras.insert(
        1,
        Camera {
            id: 1,
            model: CameraModel::Pinhole,
            width: size.0,
            height: size.1,
            params: vec![f, f, size.0 as f64 / 2.0, size.1 as f64 / 2.0],
        },
    );
    let mut images = BTreeMap::new();
    images.insert(1, look_at(1, 1, centroid - Vec3::z() * distance, centroid, "front.jpg"));
    images.insert(
        2,
        look_at(
            2,
            1,
            centroid + Vec3::new(1.0, 0.3, 0.5).normalize() * distance,
            centroid,
            "side.jpg",
        ),
    );
    SfmModel {
        cameras,
        images,
        points,
    }
}

/// Writes `lidar.ply`, `sparse/` and `corr.txt` under `dir`.
pub fn write_scene(dir: &Path, s: &Scene, size: (u64, u64)) {
    write_ply(&s.lidar, dir.join("lidar.ply"), PlyFormat::BinaryLittleEndian).unwrap();
    let distance = 12.0 * s.truth.scale;
    write_colmap_model(&model_with_views(s.sfm.clone(), distance, size), dir.join("sparse")).unwrap();
    std::fs::write(dir.join("corr.txt"), s.corr.to_text()).unwrap();
}

/// Rotation error in degrees, translation error at the scan centroid
/// relative to `radius`, and relative scale error.
pub fn pose_errors(est: &Sim3, truth: &Sim3, centroid: &Vec3, radius: f64) -> (f64, f64, f64) {
    let rot = est.rotation_error_deg(truth);
    let trans = (est.apply(centroid) - truth.apply(centroid)).norm() / radius;
    let scale = (est.scale / truth.scale - 1.0).abs();
    (rot, trans, scale)
}
