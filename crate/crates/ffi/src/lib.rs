//! C ABI over `splatprior`.
//!
//! Objects are opaque handles created by `sp_*_new`/`sp_*_read` functions
//! and released with the matching `sp_*_free`. Every fallible function
//! returns an [`SpStatus`]; on failure the message is kept per thread and
//! can be fetched with [`sp_last_error_message`]. Panics are caught at the
//! boundary and reported as `SP_STATUS_PANIC`.
//!
//! Pointer arguments must be null or valid for the documented number of
//! elements; null is reported as `SP_STATUS_NULL_POINTER`.

#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use nalgebra::{Quaternion, UnitQuaternion};
use splatprior::gaussian::GaussianSplat;
use splatprior::io::ply::{read_ply, write_ply, PlyFormat};
use splatprior::io::splat_ply::read_splat_ply;
use splatprior::metrics::{cloud_color_l1_nn, MetricsError};
use splatprior::registration::{
    register_pipeline, umeyama, CorrespondenceSet, PipelineParams, RegistrationError, Sim3,
};
use splatprior::render::{render, PinholeCamera, RenderOptions};
use splatprior::spatial::{voxel_downsample, KdTree};
use splatprior::{PointCloud, Vec3};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Registration = 5,
    ColorlessInput = 6,
    BufferTooSmall = 7,
    Render = 8,
    Panic = 99,
}

struct Failure(SpStatus, String);

impl Failure {
    fn new(status: SpStatus, msg: impl Into<String>) -> Self {
        Failure(status, msg.into())
    }
}

impl From<splatprior::io::PlyError> for Failure {
    fn from(e: splatprior::io::PlyError) -> Self {
        let status = match e {
            splatprior::io::PlyError::Io { .. } => SpStatus::Io,
            _ => SpStatus::Parse,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<RegistrationError> for Failure {
    fn from(e: RegistrationError) -> Self {
        let status = match e {
            RegistrationError::InvalidParameter(_) => SpStatus::InvalidArgument,
            _ => SpStatus::Registration,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<splatprior::spatial::SpatialError> for Failure {
    fn from(e: splatprior::spatial::SpatialError) -> Self {
        Failure::new(SpStatus::InvalidArgument, e.to_string())
    }
}

impl From<MetricsError> for Failure {
    fn from(e: MetricsError) -> Self {
        let status = match e {
            MetricsError::ColorlessCloud(_) => SpStatus::ColorlessInput,
            _ => SpStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<splatprior::gaussian::GaussianError> for Failure {
    fn from(e: splatprior::gaussian::GaussianError) -> Self {
        Failure::new(SpStatus::Parse, e.to_string())
    }
}

impl From<splatprior::render::RenderError> for Failure {
    fn from(e: splatprior::render::RenderError) -> Self {
        Failure::new(SpStatus::Render, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SpStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {msg}"));
            SpStatus::Panic
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes either null or a valid pointer.
    unsafe { p.as_ref() }.ok_or_else(|| Failure::new(SpStatus::NullPointer, format!("{what} is null")))
}

fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: as in `non_null`.
    unsafe { p.as_mut() }.ok_or_else(|| Failure::new(SpStatus::NullPointer, format!("{what} is null")))
}

fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::new(SpStatus::NullPointer, format!("{what} is null")));
    }
    // SAFETY: the caller guarantees `len` readable elements.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::new(SpStatus::NullPointer, format!("{what} is null")));
    }
    // SAFETY: the caller guarantees `len` writable elements.
    Ok(unsafe { std::slice::from_raw_parts_mut(p, len) })
}

fn path(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(Failure::new(SpStatus::NullPointer, "path is null"));
    }
    // SAFETY: the caller passes a NUL-terminated string.
    let s = unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Failure::new(SpStatus::InvalidArgument, "path is not UTF-8"))?;
    Ok(PathBuf::from(s))
}

fn points(xyz: &[f64]) -> Vec<Vec3> {
    xyz.chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect()
}

fn boxed<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    *out_ptr(out, "output handle")? = Box::into_raw(Box::new(value));
    Ok(())
}

/// # Safety
/// `p` is null or came from `Box::into_raw` and is not used again.
unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or null after a
/// success. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// NUL-terminated library version.
#[no_mangle]
pub extern "C" fn sp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `x ↦ scale · R(rotation) · x + translation`, rotation as `w, x, y, z`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpSim3 {
    pub scale: f64,
    pub rotation: [f64; 4],
    pub translation: [f64; 3],
}

impl From<Sim3> for SpSim3 {
    fn from(t: Sim3) -> Self {
        let q = t.rotation;
        SpSim3 {
            scale: t.scale,
            rotation: [q.w, q.i, q.j, q.k],
            translation: [t.translation.x, t.translation.y, t.translation.z],
        }
    }
}

impl SpSim3 {
    fn to_sim3(self) -> Result<Sim3, Failure> {
        let [w, x, y, z] = self.rotation;
        let q = Quaternion::new(w, x, y, z);
        let n = q.norm();
        if !(n.is_finite() && (n - 1.0).abs() < 1e-6) {
            return Err(Failure::new(
                SpStatus::InvalidArgument,
                format!("rotation norm {n} is not 1"),
            ));
        }
        let [tx, ty, tz] = self.translation;
        Ok(Sim3::new(
            self.scale,
            UnitQuaternion::from_quaternion(q),
            Vec3::new(tx, ty, tz),
        )?)
    }
}

/// Opaque colored point cloud.
pub struct SpPointCloud(PointCloud);

/// Builds a cloud from `n` interleaved `xyz` triples and, unless `rgb` is
/// null, `n` interleaved color triples.
#[no_mangle]
pub extern "C" fn sp_cloud_new(xyz: *const f64, rgb: *const u8, n: usize, out: *mut *mut SpPointCloud) -> SpStatus {
    guard(|| {
        let pos = points(slice(xyz, 3 * n, "xyz")?);
        let cloud = if rgb.is_null() {
            PointCloud::from_positions(pos)
        } else {
            let colors = slice(rgb, 3 * n, "rgb")?
                .chunks_exact(3)
                .map(|c| [c[0], c[1], c[2]])
                .collect();
            PointCloud::new(pos, colors)
        };
        boxed(out, SpPointCloud(cloud))
    })
}

#[no_mangle]
pub extern "C" fn sp_cloud_read_ply(path_: *const c_char, out: *mut *mut SpPointCloud) -> SpStatus {
    guard(|| boxed(out, SpPointCloud(read_ply(path(path_)?)?)))
}

/// Writes binary little-endian PLY unless `ascii` is nonzero.
#[no_mangle]
pub extern "C" fn sp_cloud_write_ply(cloud: *const SpPointCloud, path_: *const c_char, ascii: i32) -> SpStatus {
    guard(|| {
        let format = if ascii != 0 {
            PlyFormat::Ascii
        } else {
            PlyFormat::BinaryLittleEndian
        };
        Ok(write_ply(&non_null(cloud, "cloud")?.0, path(path_)?, format)?)
    })
}

/// Number of points; 0 for a null handle.
#[no_mangle]
pub extern "C" fn sp_cloud_len(cloud: *const SpPointCloud) -> usize {
    // SAFETY: null or a live handle.
    unsafe { cloud.as_ref() }.map_or(0, |c| c.0.len())
}

/// Copies positions into `xyz` (`capacity` doubles, at least `3 · len`).
#[no_mangle]
pub extern "C" fn sp_cloud_positions(cloud: *const SpPointCloud, xyz: *mut f64, capacity: usize) -> SpStatus {
    guard(|| {
        let c = &non_null(cloud, "cloud")?.0;
        if capacity < 3 * c.len() {
            return Err(Failure::new(
                SpStatus::BufferTooSmall,
                format!("need {} doubles", 3 * c.len()),
            ));
        }
        let dst = slice_mut(xyz, 3 * c.len(), "xyz")?;
        for (d, p) in dst.chunks_exact_mut(3).zip(&c.positions) {
            d.copy_from_slice(p.as_slice());
        }
        Ok(())
    })
}

/// Copies colors into `rgb` (`capacity` bytes, at least `3 · len`).
#[no_mangle]
pub extern "C" fn sp_cloud_colors(cloud: *const SpPointCloud, rgb: *mut u8, capacity: usize) -> SpStatus {
    guard(|| {
        let c = &non_null(cloud, "cloud")?.0;
        if capacity < 3 * c.len() {
            return Err(Failure::new(
                SpStatus::BufferTooSmall,
                format!("need {} bytes", 3 * c.len()),
            ));
        }
        let dst = slice_mut(rgb, 3 * c.len(), "rgb")?;
        for (d, col) in dst.chunks_exact_mut(3).zip(&c.colors) {
            d.copy_from_slice(col);
        }
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn sp_cloud_transform(cloud: *const SpPointCloud, t: SpSim3, out: *mut *mut SpPointCloud) -> SpStatus {
    guard(|| {
        let t = t.to_sim3()?;
        boxed(out, SpPointCloud(t.apply_cloud(&non_null(cloud, "cloud")?.0)))
    })
}

/// One centroid point per occupied cube of side `edge`.
#[no_mangle]
pub extern "C" fn sp_cloud_voxel_downsample(
    cloud: *const SpPointCloud,
    edge: f64,
    out: *mut *mut SpPointCloud,
) -> SpStatus {
    guard(|| boxed(out, SpPointCloud(voxel_downsample(&non_null(cloud, "cloud")?.0, edge)?)))
}

/// # Safety
/// `cloud` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_cloud_free(cloud: *mut SpPointCloud) {
    free(cloud)
}

/// Opaque exact nearest-neighbor index over a copy of a cloud's positions.
pub struct SpKdTree(KdTree);

#[no_mangle]
pub extern "C" fn sp_kdtree_new(cloud: *const SpPointCloud, out: *mut *mut SpKdTree) -> SpStatus {
    guard(|| boxed(out, SpKdTree(KdTree::build(&non_null(cloud, "cloud")?.0.positions)?)))
}

/// Nearest point to each of `n` interleaved queries; ties go to the
/// smaller index.
#[no_mangle]
pub extern "C" fn sp_kdtree_nearest(
    tree: *const SpKdTree,
    queries: *const f64,
    n: usize,
    out_index: *mut usize,
    out_distance: *mut f64,
) -> SpStatus {
    guard(|| {
        let tree = &non_null(tree, "tree")?.0;
        let q = points(slice(queries, 3 * n, "queries")?);
        if q.iter().any(|p| !p.iter().all(|v| v.is_finite())) {
            return Err(Failure::new(SpStatus::InvalidArgument, "non-finite query"));
        }
        let idx = slice_mut(out_index, n, "out_index")?;
        let dist = slice_mut(out_distance, n, "out_distance")?;
        for ((m, i), d) in tree.nearest_batch(&q).iter().zip(idx).zip(dist) {
            *i = m.index;
            *d = m.distance;
        }
        Ok(())
    })
}

/// # Safety
/// `tree` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_kdtree_free(tree: *mut SpKdTree) {
    free(tree)
}

/// Least-squares transform taking `n` source points onto `n` targets;
/// the scale stays 1 unless `with_scale` is nonzero.
#[no_mangle]
pub extern "C" fn sp_umeyama(
    src: *const f64,
    dst: *const f64,
    n: usize,
    with_scale: i32,
    out: *mut SpSim3,
) -> SpStatus {
    guard(|| {
        let t = umeyama(
            &points(slice(src, 3 * n, "src")?),
            &points(slice(dst, 3 * n, "dst")?),
            with_scale != 0,
        )?;
        *out_ptr(out, "out")? = t.into();
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn sp_sim3_apply(t: SpSim3, p: *const f64, out: *mut f64) -> SpStatus {
    guard(|| {
        let q = points(slice(p, 3, "p")?)[0];
        let r = t.to_sim3()?.apply(&q);
        slice_mut(out, 3, "out")?.copy_from_slice(r.as_slice());
        Ok(())
    })
}

/// Registration settings. Start from [`sp_register_params_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SpRegisterParams {
    pub radius_percentile: f64,
    pub outlier_factor: f64,
    pub sfm_error_percentile: f64,
    pub sfm_distance_factor: f64,
    pub coarse_with_scale: i32,
    pub trim_fraction: f64,
    pub max_iterations: usize,
    pub relative_tolerance: f64,
    /// Non-positive means unlimited.
    pub max_correspondence_distance: f64,
}

#[no_mangle]
pub extern "C" fn sp_register_params_default() -> SpRegisterParams {
    let p = PipelineParams::new();
    let percentile = match p.scale.radius {
        splatprior::registration::RadiusMode::Percentile { percentile } => percentile,
        splatprior::registration::RadiusMode::MaxDistance => 100.0,
    };
    SpRegisterParams {
        radius_percentile: percentile,
        outlier_factor: p.scale.outlier_factor,
        sfm_error_percentile: p.sfm_filter.error_percentile,
        sfm_distance_factor: p.sfm_filter.distance_factor,
        coarse_with_scale: p.coarse_with_scale as i32,
        trim_fraction: p.icp.trim_fraction,
        max_iterations: p.icp.max_iterations,
        relative_tolerance: p.icp.relative_tolerance,
        max_correspondence_distance: -1.0,
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct SpRegisterReport {
    pub estimated_scale: f64,
    pub iterations: usize,
    /// NaN when no round ran.
    pub final_rms: f64,
    pub inlier_fraction: f64,
    pub converged: i32,
    pub sfm_points_used: usize,
}

/// Registers `lidar` into the frame of `sfm` (`sfm_errors` may be null).
/// Non-convergence is not an error: check `report.converged`.
#[no_mangle]
pub extern "C" fn sp_register(
    lidar: *const SpPointCloud,
    sfm: *const SpPointCloud,
    sfm_errors: *const f64,
    corr_src: *const f64,
    corr_dst: *const f64,
    n_corr: usize,
    params: *const SpRegisterParams,
    out: *mut SpSim3,
    report: *mut SpRegisterReport,
) -> SpStatus {
    guard(|| {
        let lidar = &non_null(lidar, "lidar")?.0;
        let sfm = &non_null(sfm, "sfm")?.0;
        let errors = if sfm_errors.is_null() {
            None
        } else {
            Some(slice(sfm_errors, sfm.len(), "sfm_errors")?)
        };
        let corr = CorrespondenceSet::new(
            points(slice(corr_src, 3 * n_corr, "corr_src")?)
                .into_iter()
                .zip(points(slice(corr_dst, 3 * n_corr, "corr_dst")?)),
        );
        let c = non_null(params, "params")?;
        let mut p = PipelineParams::new();
        p.scale.radius = if c.radius_percentile >= 100.0 {
            splatprior::registration::RadiusMode::MaxDistance
        } else {
            splatprior::registration::RadiusMode::Percentile {
                percentile: c.radius_percentile,
            }
        };
        p.scale.outlier_factor = c.outlier_factor;
        p.sfm_filter.error_percentile = c.sfm_error_percentile;
        p.sfm_filter.distance_factor = c.sfm_distance_factor;
        p.coarse_with_scale = c.coarse_with_scale != 0;
        p.icp.trim_fraction = c.trim_fraction;
        p.icp.max_iterations = c.max_iterations;
        p.icp.relative_tolerance = c.relative_tolerance;
        p.icp.max_correspondence_distance = if c.max_correspondence_distance > 0.0 {
            c.max_correspondence_distance
        } else {
            f64::INFINITY
        };
        let r = register_pipeline(lidar, sfm, errors, &corr, &p)?;
        *out_ptr(out, "out")? = r.transform.into();
        if !report.is_null() {
            *out_ptr(report, "report")? = SpRegisterReport {
                estimated_scale: r.estimated_scale,
                iterations: r.icp.iterations,
                final_rms: r.icp.final_rms.unwrap_or(f64::NAN),
                inlier_fraction: r.icp.inlier_fraction,
                converged: r.icp.converged as i32,
                sfm_points_used: r.sfm_points_used,
            };
        }
        Ok(())
    })
}

/// Mean absolute per-channel color difference (0–255) from each `pred`
/// point to its nearest `gt` point.
#[no_mangle]
pub extern "C" fn sp_cloud_color_l1(pred: *const SpPointCloud, gt: *const SpPointCloud, out: *mut f64) -> SpStatus {
    guard(|| {
        let r = cloud_color_l1_nn(&non_null(pred, "pred")?.0, &non_null(gt, "gt")?.0, f64::INFINITY)?;
        *out_ptr(out, "out")? = r
            .color_l1
            .ok_or_else(|| Failure::new(SpStatus::InvalidArgument, "no matches"))?;
        Ok(())
    })
}

/// Opaque set of Gaussian splats.
pub struct SpSplats(Vec<GaussianSplat>);

#[no_mangle]
pub extern "C" fn sp_splats_read_ply(path_: *const c_char, out: *mut *mut SpSplats) -> SpStatus {
    guard(|| {
        let file = read_splat_ply(path(path_)?)?;
        let splats = file
            .records
            .iter()
            .map(GaussianSplat::from_record)
            .collect::<Result<_, _>>()?;
        boxed(out, SpSplats(splats))
    })
}

#[no_mangle]
pub extern "C" fn sp_splats_len(splats: *const SpSplats) -> usize {
    // SAFETY: null or a live handle.
    unsafe { splats.as_ref() }.map_or(0, |s| s.0.len())
}

/// # Safety
/// `splats` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_splats_free(splats: *mut SpSplats) {
    free(splats)
}

/// Pinhole camera; `rotation` (`w, x, y, z`) and `translation` map world
/// to camera coordinates, with +z forward and +y down.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SpCamera {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    pub rotation: [f64; 4],
    pub translation: [f64; 3],
}

/// Renders into `rgb`, `3 · width · height` row-major interleaved floats
/// in [0, 1].
#[no_mangle]
pub extern "C" fn sp_render(
    splats: *const SpSplats,
    camera: *const SpCamera,
    background: *const f64,
    rgb: *mut f32,
    capacity: usize,
) -> SpStatus {
    guard(|| {
        let s = &non_null(splats, "splats")?.0;
        let c = non_null(camera, "camera")?;
        let pose = SpSim3 {
            scale: 1.0,
            rotation: c.rotation,
            translation: c.translation,
        }
        .to_sim3()?;
        let cam = PinholeCamera::new(
            (c.fx, c.fy, c.cx, c.cy),
            (c.width, c.height),
            pose.rotation,
            pose.translation,
        )?;
        let need = 3 * c.width * c.height;
        if capacity < need {
            return Err(Failure::new(SpStatus::BufferTooSmall, format!("need {need} floats")));
        }
        let mut opts = RenderOptions::default();
        if !background.is_null() {
            let b = slice(background, 3, "background")?;
            opts.background = [b[0], b[1], b[2]];
        }
        let img = render(s, &cam, &opts)?;
        for (d, v) in slice_mut(rgb, need, "rgb")?.iter_mut().zip(&img.data) {
            *d = *v as f32;
        }
        Ok(())
    })
}
