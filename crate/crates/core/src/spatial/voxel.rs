//! Voxel-grid downsampling to one centroid per occupied cell.

use std::collections::HashMap;

use crate::cloud::{PointCloud, Vec3};

use super::SpatialError;

/// Integer cell coordinates relative to the grid origin.
pub type CellKey = [i64; 3];

/// A cubic lattice of cells with edge `edge`.
///
/// The origin is the cloud's minimum corner snapped down to a multiple of
/// `edge`, so translated coordinates are non-negative and clouds that share
/// a lattice (for example a cloud and its own downsampled output) bin
/// identically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VoxelGrid {
    pub edge: f64,
    pub origin: Vec3,
}

impl VoxelGrid {
    pub fn for_cloud(cloud: &PointCloud, edge: f64) -> Result<Self, SpatialError> {
        if !(edge > 0.0 && edge.is_finite()) {
            return Err(SpatialError::InvalidEdge(edge));
        }
        let (lo, _) = cloud.bounds().unwrap_or((Vec3::zeros(), Vec3::zeros()));
        Ok(VoxelGrid {
            edge,
            origin: lo.map(|c| (c / edge).floor() * edge),
        })
    }

    pub fn key(&self, p: &Vec3) -> CellKey {
        let r = (p - self.origin) / self.edge;
        [r.x.floor() as i64, r.y.floor() as i64, r.z.floor() as i64]
    }

    /// Axis-aligned bounds `(min, max)` of a cell.
    pub fn cell_bounds(&self, key: CellKey) -> (Vec3, Vec3) {
        let lo = self.origin + Vec3::new(key[0] as f64, key[1] as f64, key[2] as f64) * self.edge;
        (lo, lo + Vec3::repeat(self.edge))
    }
}

#[derive(Default)]
struct Acc {
    sum: Vec3,
    rgb: [u64; 3],
    intensity: f64,
    n: u64,
}

/// Replaces the points of each occupied cell with their centroid and
/// rounded mean color. Output order is the order in which cells are first
/// hit.
pub fn voxel_downsample(cloud: &PointCloud, edge: f64) -> Result<PointCloud, SpatialError> {
    let grid = VoxelGrid::for_cloud(cloud, edge)?;
    Ok(downsample_on(cloud, &grid))
}

pub fn downsample_on(cloud: &PointCloud, grid: &VoxelGrid) -> PointCloud {
    let mut slots: HashMap<CellKey, usize> = HashMap::new();
    let mut accs: Vec<Acc> = Vec::new();
    for (i, p) in cloud.positions.iter().enumerate() {
        let slot = *slots.entry(grid.key(p)).or_insert_with(|| {
            accs.push(Acc::default());
            accs.len() - 1
        });
        let a = &mut accs[slot];
        a.sum += p;
        for c in 0..3 {
            a.rgb[c] += cloud.colors[i][c] as u64;
        }
        if let Some(int) = &cloud.intensity {
            a.intensity += int[i] as f64;
        }
        a.n += 1;
    }
    let mut out = PointCloud {
        positions: Vec::with_capacity(accs.len()),
        colors: Vec::with_capacity(accs.len()),
        intensity: cloud.intensity.as_ref().map(|_| Vec::with_capacity(accs.len())),
        synthetic_colors: cloud.synthetic_colors,
    };
    for a in accs {
        out.positions.push(a.sum / a.n as f64);
        // Round half up in integer arithmetic.
        out.colors
            .push(a.rgb.map(|s| ((2 * s + a.n) / (2 * a.n)).min(255) as u8));
        if let Some(int) = out.intensity.as_mut() {
            int.push((a.intensity / a.n as f64) as f32);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn cube_corners_collapse_to_center() {
        let mut pos = Vec::new();
        for i in 0..8 {
            pos.push(Vec3::new(
                0.05 + 0.1 * (i & 1) as f64,
                0.05 + 0.1 * ((i >> 1) & 1) as f64,
                0.05 + 0.1 * ((i >> 2) & 1) as f64,
            ));
        }
        let cloud = PointCloud::new(pos, vec![[10, 20, 31]; 8]);
        let out = voxel_downsample(&cloud, 0.2).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out.positions[0] - Vec3::repeat(0.1)).norm() < 1e-15);
        assert_eq!(out.colors[0], [10, 20, 31]);
    }

    #[test]
    fn color_mean_rounds_to_nearest() {
        let cloud = PointCloud::new(vec![Vec3::zeros(); 2], vec![[0, 1, 255], [1, 2, 254]]);
        let out = voxel_downsample(&cloud, 1.0).unwrap();
        // 0.5 → 1, 1.5 → 2, 254.5 → 255
        assert_eq!(out.colors[0], [1, 2, 255]);
    }

    #[test]
    fn sparse_points_survive() {
        let pos: Vec<Vec3> = (0..5)
            .flat_map(|i| (0..5).map(move |j| Vec3::new(i as f64 * 0.3, j as f64 * 0.3, -1.0)))
            .collect();
        let cloud = PointCloud::from_positions(pos.clone());
        let out = voxel_downsample(&cloud, 0.2).unwrap();
        assert_eq!(out.positions, pos);
    }

    #[test]
    fn invalid_edge() {
        let cloud = PointCloud::from_positions(vec![Vec3::zeros()]);
        for e in [0.0, -1.0, f64::NAN] {
            assert!(matches!(voxel_downsample(&cloud, e), Err(SpatialError::InvalidEdge(_))));
        }
    }

    #[test]
    fn output_stays_in_source_cell() {
        let pos: Vec<Vec3> = (0..2000)
            .map(|i| {
                let t = i as f64;
                Vec3::new((t * 0.618).sin() * 3.0, (t * 0.37).cos() * 2.0, (t * 0.11).sin())
            })
            .collect();
        let cloud = PointCloud::from_positions(pos);
        let grid = VoxelGrid::for_cloud(&cloud, 0.25).unwrap();
        let out = downsample_on(&cloud, &grid);
        let keys: HashSet<CellKey> = cloud.positions.iter().map(|p| grid.key(p)).collect();
        assert_eq!(out.len(), keys.len());
        let mut seen = HashSet::new();
        for p in &out.positions {
            let k = grid.key(p);
            assert!(keys.contains(&k));
            assert!(seen.insert(k), "one point per cell");
        }
    }
}
