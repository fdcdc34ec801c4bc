//! Nearest-neighbour search and voxel downsampling.

pub mod kdtree;
pub mod voxel;

pub use kdtree::{KdTree, Neighbor};
pub use voxel::{voxel_downsample, VoxelGrid};

#[derive(Debug, thiserror::Error)]
pub enum SpatialError {
    #[error("cannot index an empty cloud")]
    EmptyCloud,
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("voxel edge must be positive and finite, got {0}")]
    InvalidEdge(f64),
}
