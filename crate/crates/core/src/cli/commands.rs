use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use crate::fusion::{colmap_export_files, fuse_prior, seed_scales, FusionConfig};
use crate::gaussian::GaussianSplat;
use crate::io::colmap::{read_colmap_model, SfmModel};
use crate::io::ply::{encode_point_cloud, parse_point_cloud, PlyFormat};
use crate::io::splat_ply::{encode_splat_ply, is_splat_ply, parse_splat_ply, SplatCloudFile};
use crate::manifest::{digest_bytes, digest_file, FileDigest, Manifest};
use crate::metrics::{
    cloud_color_l1_hungarian, cloud_color_l1_nn, splats_to_cloud, ImageBatchReport, ImagePairReport, HUNGARIAN_CAP,
};
use crate::registration::{
    register_pipeline, CorrespondenceSet, IcpReport, PipelineParams, RadiusMode, Sim3, TransformJson,
};
use crate::render::image::ImageFormat;
use crate::render::{render as render_image, PinholeCamera, RenderOptions, RgbImage};
use crate::PointCloud;

use super::config::FileConfig;
use super::error::{CliError, ErrorKind};
use super::{
    ConvertArgs, EvalCloudArgs, EvalImagesArgs, FormatArg, FuseArgs, ModeArg, Outcome, RadiusModeArg, RegisterArgs,
    RenderArgs,
};

pub struct Context {
    pub file: FileConfig,
    pub deterministic: bool,
    pub force: bool,
}

fn require(value: Option<PathBuf>, flag: &str) -> Result<PathBuf, CliError> {
    value.ok_or_else(|| {
        CliError::new(
            ErrorKind::InvalidConfig,
            format!("--{flag} is required (flag, environment or config)"),
        )
    })
}

fn existing(value: Option<PathBuf>, flag: &str) -> Result<PathBuf, CliError> {
    let path = require(value, flag)?;
    if !path.exists() {
        return Err(CliError::new(
            ErrorKind::MissingInput,
            format!("--{flag}: {} does not exist", path.display()),
        ));
    }
    Ok(path)
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

fn pretty<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s.into_bytes()
}

fn range_check(name: &str, value: f64, ok: bool) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::new(
            ErrorKind::InvalidConfig,
            format!("{name} = {value} is out of range"),
        ))
    }
}

/// Digests of the model files in a COLMAP directory, keyed `colmap/<name>`.
fn colmap_inputs(dir: &Path) -> Result<BTreeMap<String, FileDigest>, CliError> {
    let mut out = BTreeMap::new();
    for stem in ["cameras", "images", "points3D"] {
        for ext in ["bin", "txt"] {
            let p = dir.join(format!("{stem}.{ext}"));
            if p.is_file() {
                let d = digest_file(&p)?;
                out.insert(format!("colmap/{}", d.name), d);
            }
        }
    }
    Ok(out)
}

/// Writes `files` under `out_dir` followed by the manifest, after checking
/// that the manifest may be written.
fn emit(
    out_dir: &Path,
    manifest_name: &str,
    files: Vec<(String, Vec<u8>)>,
    mut manifest: Manifest,
    force: bool,
) -> Result<(), CliError> {
    for (name, bytes) in &files {
        manifest.outputs.insert(name.clone(), digest_bytes(name.clone(), bytes));
    }
    let manifest_path = out_dir.join(manifest_name);
    let manifest_bytes = manifest.to_json().into_bytes();
    if let Ok(existing) = std::fs::read(&manifest_path) {
        if existing != manifest_bytes && !force {
            return Err(crate::manifest::ManifestError::WouldOverwrite(manifest_path).into());
        }
    }
    for (name, bytes) in &files {
        let path = out_dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
    }
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    crate::manifest::write_guarded(&manifest_path, &manifest_bytes, true)?;
    Ok(())
}

fn read_points(path: &Path) -> Result<PointCloud, CliError> {
    let bytes = read(path)?;
    let (cloud, stats) = parse_point_cloud(&bytes)?;
    if stats.dropped_non_finite > 0 {
        log::warn!(
            "{}: dropped {} of {} points with non-finite coordinates",
            path.display(),
            stats.dropped_non_finite,
            stats.declared
        );
    }
    Ok(cloud)
}

fn read_model(dir: &Path) -> Result<SfmModel, CliError> {
    Ok(read_colmap_model(dir)?)
}

fn read_splats(path: &Path) -> Result<Vec<GaussianSplat>, CliError> {
    let file = parse_splat_ply(&read(path)?)?;
    file.records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            GaussianSplat::from_record(r)
                .map_err(|e| CliError::new(ErrorKind::InvalidInput, format!("{} splat {i}: {e}", path.display())))
        })
        .collect()
}

fn pipeline_params(f: &FileConfig, a: &RegisterArgs) -> Result<PipelineParams, CliError> {
    let c = &f.registration;
    let mut p = PipelineParams::new();
    let mode = match (a.radius_mode, c.radius_mode.as_deref()) {
        (Some(m), _) => m,
        (None, None | Some("percentile")) => RadiusModeArg::Percentile,
        (None, Some("max")) => RadiusModeArg::Max,
        (None, Some(other)) => {
            return Err(CliError::new(
                ErrorKind::InvalidConfig,
                format!("radius_mode {other:?} is not percentile or max"),
            ))
        }
    };
    let percentile = a.percentile.or(c.percentile).unwrap_or(95.0);
    range_check("percentile", percentile, percentile > 0.0 && percentile <= 100.0)?;
    p.scale.radius = match mode {
        RadiusModeArg::Percentile => RadiusMode::Percentile { percentile },
        RadiusModeArg::Max => RadiusMode::MaxDistance,
    };
    if let Some(v) = a.outlier_factor.or(c.outlier_factor) {
        range_check("outlier_factor", v, v > 0.0)?;
        p.scale.outlier_factor = v;
    }
    if let Some(v) = a.sfm_error_percentile.or(c.sfm_error_percentile) {
        range_check("sfm_error_percentile", v, v > 0.0 && v <= 100.0)?;
        p.sfm_filter.error_percentile = v;
    }
    if let Some(v) = a.sfm_distance_factor.or(c.sfm_distance_factor) {
        range_check("sfm_distance_factor", v, v > 0.0)?;
        p.sfm_filter.distance_factor = v;
    }
    p.coarse_with_scale = !a.rigid_coarse && c.coarse_with_scale.unwrap_or(true);
    if let Some(v) = a.trim_fraction.or(c.trim_fraction) {
        p.icp.trim_fraction = v;
    }
    if let Some(v) = a.max_iterations.or(c.max_iterations) {
        p.icp.max_iterations = v;
    }
    if let Some(v) = a.relative_tolerance.or(c.relative_tolerance) {
        p.icp.relative_tolerance = v;
    }
    if let Some(v) = a.max_correspondence_distance.or(c.max_correspondence_distance) {
        p.icp.max_correspondence_distance = v;
    }
    p.icp.validate()?;
    Ok(p)
}

#[derive(Serialize)]
struct StagesJson {
    scale_only: TransformJson,
    coarse: TransformJson,
    icp: TransformJson,
}

#[derive(Serialize)]
struct RegisterReport {
    schema: u32,
    converged: bool,
    lidar_points: usize,
    sfm_points: usize,
    sfm_points_used: usize,
    correspondences: usize,
    estimated_scale: f64,
    /// Algorithm-independent summary of `transform`.
    transform_scale: f64,
    stages: StagesJson,
    icp: IcpReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u128>,
}

pub fn register(ctx: &Context, a: &RegisterArgs) -> Result<Outcome, CliError> {
    let paths = &ctx.file.paths;
    let lidar_path = existing(a.lidar.clone().or(paths.lidar.clone()), "lidar")?;
    let colmap_dir = existing(a.colmap.clone().or(paths.colmap.clone()), "colmap")?;
    let corr_path = existing(
        a.correspondences.clone().or(paths.correspondences.clone()),
        "correspondences",
    )?;
    let out = require(a.out.clone().or(paths.output.clone()), "out")?;
    let params = pipeline_params(&ctx.file, a)?;

    let start = Instant::now();
    let raw = read_points(&lidar_path)?;
    let model = read_model(&colmap_dir)?;
    let corr = CorrespondenceSet::parse(
        &String::from_utf8(read(&corr_path)?)
            .map_err(|_| CliError::new(ErrorKind::InvalidInput, format!("{} is not UTF-8", corr_path.display())))?,
    )?;
    let result = register_pipeline(&raw, &model.points.cloud, Some(&model.points.errors), &corr, &params)?;

    let report = RegisterReport {
        schema: 1,
        converged: result.icp.converged,
        lidar_points: raw.len(),
        sfm_points: model.points.len(),
        sfm_points_used: result.sfm_points_used,
        correspondences: corr.source.len(),
        estimated_scale: result.estimated_scale,
        transform_scale: result.transform.scale,
        stages: StagesJson {
            scale_only: result.stages.scale_only.to_json(),
            coarse: result.stages.coarse.to_json(),
            icp: result.stages.icp.to_json(),
        },
        icp: result.icp.clone(),
        elapsed_ms: (!ctx.deterministic).then(|| start.elapsed().as_millis()),
    };
    let mut manifest = Manifest::new("register");
    manifest.config = serde_json::to_value(params).expect("params serialize");
    manifest.inputs.insert("lidar".into(), digest_file(&lidar_path)?);
    manifest
        .inputs
        .insert("correspondences".into(), digest_file(&corr_path)?);
    manifest.inputs.extend(colmap_inputs(&colmap_dir)?);
    manifest.summary = json!({ "converged": report.converged, "lidar_points": raw.len() });
    let files = vec![
        ("transform.json".to_string(), pretty(&result.transform.to_json())),
        ("report.json".to_string(), pretty(&report)),
    ];
    emit(&out, "manifest.json", files, manifest, ctx.force)?;
    Ok(if result.icp.converged {
        Outcome::Done
    } else {
        Outcome::NotConverged
    })
}

pub fn fuse(ctx: &Context, a: &FuseArgs) -> Result<Outcome, CliError> {
    let paths = &ctx.file.paths;
    let lidar_path = existing(a.lidar.clone().or(paths.lidar.clone()), "lidar")?;
    let transform_path = existing(a.transform.clone().or(paths.transform.clone()), "transform")?;
    let colmap_dir = a.colmap.clone().or(paths.colmap.clone());
    if let Some(d) = &colmap_dir {
        if !d.is_dir() {
            return Err(CliError::new(
                ErrorKind::MissingInput,
                format!("--colmap: {} is not a directory", d.display()),
            ));
        }
    }
    let out = require(a.out.clone().or(paths.output.clone()), "out")?;

    let json: TransformJson = serde_json::from_slice(&read(&transform_path)?)
        .map_err(|e| CliError::new(ErrorKind::InvalidInput, format!("{}: {e}", transform_path.display())))?;
    let transform = Sim3::from_json(&json)?;
    let f = &ctx.file.fusion;
    let cfg = FusionConfig {
        metric_edge: a.metric_edge.or(f.metric_edge).unwrap_or(0.20),
        frame_scale: a.frame_scale.or(f.frame_scale).unwrap_or(transform.scale),
        max_points: a.max_points.or(f.max_points),
        opacity: a.opacity.or(f.opacity).unwrap_or(0.1),
    };
    let raw = read_points(&lidar_path)?;
    let prior = fuse_prior(&raw, &transform, &cfg)?;

    let mut files = vec![
        (
            "init.ply".to_string(),
            encode_point_cloud(&prior.cloud, PlyFormat::BinaryLittleEndian)?,
        ),
        ("seed_splats.ply".to_string(), encode_splat_ply(&prior.splat_file())?),
    ];
    for (name, bytes) in colmap_export_files(&prior.cloud, colmap_dir.as_deref())? {
        files.push((format!("sparse/{name}"), bytes));
    }
    let mut manifest = Manifest::new("fuse");
    manifest.config = json!({ "fusion": cfg, "transform": transform.to_json() });
    manifest.inputs.insert("lidar".into(), digest_file(&lidar_path)?);
    manifest
        .inputs
        .insert("transform".into(), digest_file(&transform_path)?);
    if let Some(d) = &colmap_dir {
        manifest.inputs.extend(colmap_inputs(d)?);
    }
    manifest.summary = json!({
        "input_points": raw.len(),
        "output_points": prior.cloud.len(),
        "seed_splats": prior.splats.len(),
        "edge": prior.edge,
    });
    emit(&out, "manifest.json", files, manifest, ctx.force)?;
    Ok(Outcome::Done)
}

/// Supported images directly in `dir`, keyed by file stem.
fn list_images(dir: &Path) -> Result<BTreeMap<String, PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if !path.is_file() || ImageFormat::from_path(&path).is_err() {
            continue;
        }
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        if let Some(prev) = out.insert(stem.clone(), path.clone()) {
            return Err(CliError::new(
                ErrorKind::InvalidInput,
                format!("{} and {} share the name {stem:?}", prev.display(), path.display()),
            ));
        }
    }
    Ok(out)
}

pub fn eval_images(ctx: &Context, a: &EvalImagesArgs) -> Result<Outcome, CliError> {
    let paths = &ctx.file.paths;
    let pred_dir = existing(a.pred.clone().or(paths.pred.clone()), "pred")?;
    let gt_dir = existing(a.gt.clone().or(paths.gt.clone()), "gt")?;
    let out = require(a.out.clone().or(paths.output.clone()), "out")?;
    let pred = list_images(&pred_dir)?;
    let gt = list_images(&gt_dir)?;
    let mut unmatched: Vec<String> = pred
        .keys()
        .filter(|k| !gt.contains_key(*k))
        .map(|k| format!("pred/{k}"))
        .collect();
    unmatched.extend(gt.keys().filter(|k| !pred.contains_key(*k)).map(|k| format!("gt/{k}")));
    if !unmatched.is_empty() {
        let mut e = CliError::new(
            ErrorKind::UnmatchedImages,
            format!("{} images have no counterpart", unmatched.len()),
        );
        e.details = unmatched;
        return Err(e);
    }
    if gt.is_empty() {
        return Err(CliError::new(
            ErrorKind::MissingInput,
            format!("no .png or .rawf images in {}", gt_dir.display()),
        ));
    }
    let mut manifest = Manifest::new("eval-images");
    let mut pairs = Vec::with_capacity(gt.len());
    for (name, gt_path) in &gt {
        let pred_path = &pred[name];
        let p = RgbImage::load(pred_path)?;
        let g = RgbImage::load(gt_path)?;
        pairs.push(ImagePairReport::compute(name.clone(), &p, &g)?);
        for (side, path) in [("pred", pred_path), ("gt", gt_path)] {
            let d = digest_file(path)?;
            manifest.inputs.insert(format!("{side}/{}", d.name), d);
        }
    }
    let batch = ImageBatchReport::from_pairs(pairs);
    let csv = batch
        .to_csv()
        .map_err(|e| CliError::new(ErrorKind::Io, format!("csv: {e}")))?;
    manifest.summary = json!({ "images": batch.image_count, "mean_l1": batch.mean_l1, "mean_psnr": batch.mean_psnr });
    let files = vec![
        ("images_report.json".to_string(), pretty(&batch)),
        ("images_report.csv".to_string(), csv.into_bytes()),
    ];
    emit(&out, "manifest.json", files, manifest, ctx.force)?;
    Ok(Outcome::Done)
}

/// Points from a point PLY, or means with canonical colors from a splat PLY.
fn read_cloud_or_splats(path: &Path) -> Result<(PointCloud, &'static str), CliError> {
    let bytes = read(path)?;
    if is_splat_ply(&bytes) {
        let file = parse_splat_ply(&bytes)?;
        let splats: Vec<GaussianSplat> = file
            .records
            .iter()
            .map(GaussianSplat::from_record)
            .collect::<Result<_, _>>()?;
        Ok((splats_to_cloud(&splats), "splats"))
    } else {
        let (cloud, _) = parse_point_cloud(&bytes)?;
        Ok((cloud, "points"))
    }
}

pub fn eval_cloud(ctx: &Context, a: &EvalCloudArgs) -> Result<Outcome, CliError> {
    let paths = &ctx.file.paths;
    let m = &ctx.file.metrics;
    let pred_path = existing(a.pred.clone().or(paths.pred.clone()), "pred")?;
    let gt_path = existing(a.gt.clone().or(paths.gt.clone()), "gt")?;
    let out = require(a.out.clone().or(paths.output.clone()), "out")?;
    let mode = match (a.mode, m.mode.as_deref()) {
        (Some(mode), _) => mode,
        (None, None | Some("nn")) => ModeArg::Nn,
        (None, Some("hungarian")) => ModeArg::Hungarian,
        (None, Some(other)) => {
            return Err(CliError::new(
                ErrorKind::InvalidConfig,
                format!("mode {other:?} is not nn or hungarian"),
            ))
        }
    };
    let max_dist = a.max_match_distance.or(m.max_match_distance).unwrap_or(f64::INFINITY);
    let cap = a.hungarian_cap.or(m.hungarian_cap).unwrap_or(HUNGARIAN_CAP);
    let (pred, pred_kind) = read_cloud_or_splats(&pred_path)?;
    let (gt, _) = read_cloud_or_splats(&gt_path)?;
    let report = match mode {
        ModeArg::Nn => cloud_color_l1_nn(&pred, &gt, max_dist)?,
        ModeArg::Hungarian => cloud_color_l1_hungarian(&pred, &gt, cap)?,
    };
    let mut manifest = Manifest::new("eval-cloud");
    manifest.config = json!({
        "mode": report.mode,
        "max_match_distance": max_dist.is_finite().then_some(max_dist),
        "hungarian_cap": cap,
        "pred_kind": pred_kind,
    });
    manifest.inputs.insert("pred".into(), digest_file(&pred_path)?);
    manifest.inputs.insert("gt".into(), digest_file(&gt_path)?);
    manifest.summary = json!({ "color_l1": report.color_l1, "matched": report.matched });
    emit(
        &out,
        "manifest.json",
        vec![("cloud_report.json".to_string(), pretty(&report))],
        manifest,
        ctx.force,
    )?;
    Ok(Outcome::Done)
}

pub fn render(ctx: &Context, a: &RenderArgs) -> Result<Outcome, CliError> {
    let paths = &ctx.file.paths;
    let r = &ctx.file.render;
    let splat_path = existing(a.splats.clone().or(paths.splats.clone()), "splats")?;
    let colmap_dir = existing(a.colmap.clone().or(paths.colmap.clone()), "colmap")?;
    let out = require(a.out.clone().or(paths.output.clone()), "out")?;
    let format = match (a.format, r.format.as_deref()) {
        (Some(f), _) => f,
        (None, None | Some("png")) => FormatArg::Png,
        (None, Some("rawf")) => FormatArg::Rawf,
        (None, Some(other)) => {
            return Err(CliError::new(
                ErrorKind::InvalidConfig,
                format!("format {other:?} is not png or rawf"),
            ))
        }
    };
    let background = match a.background.as_deref() {
        Some(&[r, g, b]) => [r, g, b],
        Some(_) => return Err(CliError::new(ErrorKind::InvalidConfig, "--background takes r,g,b")),
        None => r.background.unwrap_or([0.0; 3]),
    };
    if background.iter().any(|c| !(0.0..=1.0).contains(c)) {
        return Err(CliError::new(
            ErrorKind::InvalidConfig,
            "background channels must be in [0, 1]",
        ));
    }
    let splats = read_splats(&splat_path)?;
    let model = read_model(&colmap_dir)?;
    let ids: Vec<u32> = match a.image_ids.clone().or(r.image_ids.clone()) {
        Some(ids) => ids,
        None => model.images.keys().copied().collect(),
    };
    let opts = RenderOptions {
        background,
        ..Default::default()
    };
    let ext = match format {
        FormatArg::Png => "png",
        FormatArg::Rawf => "rawf",
    };
    let mut files: Vec<(String, Vec<u8>)> = Vec::with_capacity(ids.len());
    for id in &ids {
        let image = model
            .images
            .get(id)
            .ok_or_else(|| CliError::new(ErrorKind::UnknownImage, format!("image id {id} is not in the model")))?;
        let camera = &model.cameras[&image.camera_id];
        let cam = PinholeCamera::from_colmap(camera, image)?;
        let img = render_image(&splats, &cam, &opts)?;
        let stem = Path::new(&image.name)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("image_{id}"));
        let name = format!("{stem}.{ext}");
        if files.iter().any(|(n, _)| *n == name) {
            return Err(CliError::new(
                ErrorKind::InvalidInput,
                format!("two images render to {name}"),
            ));
        }
        let bytes = match format {
            FormatArg::Png => img.encode_png()?,
            FormatArg::Rawf => img.encode_raw()?,
        };
        files.push((name, bytes));
    }
    let mut manifest = Manifest::new("render");
    manifest.config = json!({ "image_ids": ids, "format": ext, "background": background });
    manifest.inputs.insert("splats".into(), digest_file(&splat_path)?);
    manifest.inputs.extend(colmap_inputs(&colmap_dir)?);
    manifest.summary = json!({ "images": files.len(), "splats": splats.len() });
    emit(&out, "manifest.json", files, manifest, ctx.force)?;
    Ok(Outcome::Done)
}

pub fn convert(ctx: &Context, a: &ConvertArgs) -> Result<Outcome, CliError> {
    let input = existing(Some(a.input.clone()), "input")?;
    let bytes = read(&input)?;
    let (payload, config) = if is_splat_ply(&bytes) {
        let splats = read_splats(&input)?;
        let format = if a.ascii {
            PlyFormat::Ascii
        } else {
            PlyFormat::BinaryLittleEndian
        };
        (
            encode_point_cloud(&splats_to_cloud(&splats), format)?,
            json!({ "direction": "splats_to_points" }),
        )
    } else {
        let (cloud, _) = parse_point_cloud(&bytes)?;
        if !cloud.has_colors() {
            return Err(CliError::new(
                ErrorKind::ColorlessInput,
                format!("{} has no colors", input.display()),
            ));
        }
        range_check("edge", a.edge, a.edge > 0.0)?;
        range_check("opacity", a.opacity, (0.0..=1.0).contains(&a.opacity))?;
        let scales = seed_scales(&cloud.positions, a.edge)?;
        let seeds = SplatCloudFile {
            records: cloud
                .positions
                .iter()
                .zip(&cloud.colors)
                .zip(&scales)
                .map(|((p, c), &s)| {
                    GaussianSplat {
                        mean: *p,
                        scales: crate::Vec3::repeat(s),
                        rotation: nalgebra::UnitQuaternion::identity(),
                        opacity: a.opacity,
                        sh: vec![crate::gaussian::sh::dc_from_u8(*c)],
                    }
                    .to_record()
                })
                .collect(),
        };
        (
            encode_splat_ply(&seeds)?,
            json!({ "direction": "points_to_splats", "edge": a.edge, "opacity": a.opacity }),
        )
    };
    let out_dir = a
        .output
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = a
        .output
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .ok_or_else(|| CliError::new(ErrorKind::InvalidConfig, "--output needs a file name"))?;
    let mut manifest = Manifest::new("convert");
    manifest.config = config;
    manifest.inputs.insert(
        "input".into(),
        digest_bytes(
            input
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            &bytes,
        ),
    );
    emit(
        out_dir,
        &format!("{name}.manifest.json"),
        vec![(name, payload)],
        manifest,
        ctx.force,
    )?;
    Ok(Outcome::Done)
}
