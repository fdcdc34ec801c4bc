//! Register dense LiDAR scans into SfM frames, turn them into Gaussian
//! splatting priors, and score reconstructions against image and point
//! ground truth.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cloud;
pub mod fusion;
pub mod gaussian;
pub mod io;
pub mod manifest;
pub mod metrics;

pub use cloud::{PointCloud, Vec3};
pub mod registration;
pub mod render;
pub mod spatial;
