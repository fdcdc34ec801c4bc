//! The colored point cloud shared by registration, fusion and evaluation.

use nalgebra::Vector3;

pub type Vec3 = Vector3<f64>;

/// Fill color used when a file carries no color channels.
pub const MID_GRAY: [u8; 3] = [128, 128, 128];

/// Positions with one RGB color per point and an optional intensity channel.
///
/// `colors` always has the same length as `positions`. When the source had
/// no color channels the colors are [`MID_GRAY`] and `synthetic_colors` is
/// set, so color metrics can refuse the cloud instead of scoring gray.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud {
    pub positions: Vec<Vec3>,
    pub colors: Vec<[u8; 3]>,
    pub intensity: Option<Vec<f32>>,
    pub synthetic_colors: bool,
}

impl PointCloud {
    /// # Panics
    /// When `positions` and `colors` differ in length.
    pub fn new(positions: Vec<Vec3>, colors: Vec<[u8; 3]>) -> Self {
        assert_eq!(positions.len(), colors.len(), "one color per point");
        Self {
            positions,
            colors,
            intensity: None,
            synthetic_colors: false,
        }
    }

    pub fn from_positions(positions: Vec<Vec3>) -> Self {
        let colors = vec![MID_GRAY; positions.len()];
        Self {
            positions,
            colors,
            intensity: None,
            synthetic_colors: true,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn has_colors(&self) -> bool {
        !self.synthetic_colors && self.colors.len() == self.positions.len()
    }

    /// Keeps the points whose index passes `keep`, carrying colors and
    /// intensity along.
    pub fn filter_indices(&self, mut keep: impl FnMut(usize) -> bool) -> PointCloud {
        let mut out = PointCloud {
            synthetic_colors: self.synthetic_colors,
            intensity: self.intensity.as_ref().map(|_| Vec::new()),
            ..Default::default()
        };
        for i in 0..self.len() {
            if keep(i) {
                out.positions.push(self.positions[i]);
                out.colors.push(self.colors[i]);
                if let (Some(dst), Some(src)) = (out.intensity.as_mut(), self.intensity.as_ref()) {
                    dst.push(src[i]);
                }
            }
        }
        out
    }

    /// Returns a copy with every position mapped through `f`.
    pub fn map_positions(&self, f: impl Fn(&Vec3) -> Vec3) -> PointCloud {
        PointCloud {
            positions: self.positions.iter().map(f).collect(),
            colors: self.colors.clone(),
            intensity: self.intensity.clone(),
            synthetic_colors: self.synthetic_colors,
        }
    }

    /// Coordinate-wise minimum and maximum, `None` for an empty cloud.
    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        let first = *self.positions.first()?;
        Some(
            self.positions
                .iter()
                .fold((first, first), |(lo, hi), p| (lo.inf(p), hi.sup(p))),
        )
    }
}
