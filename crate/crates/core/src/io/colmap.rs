//! COLMAP sparse model (v3) in binary and text form.
//!
//! Binary layout, all little-endian:
//!
//! * `cameras.bin`: u64 count; per camera u32 id, i32 model id, u64 width,
//!   u64 height, then the model's f64 parameters.
//! * `images.bin`: u64 count; per image u32 id, 4×f64 qvec (w first),
//!   3×f64 tvec, u32 camera id, NUL-terminated name, u64 number of 2-D
//!   points, then (f64 x, f64 y, u64 point3D id) triples.
//! * `points3D.bin`: u64 count; per point u64 id, 3×f64 xyz, 3×u8 rgb,
//!   f64 error, u64 track length, then (u32 image id, u32 point2D index)
//!   pairs.
//!
//! COLMAP writes -1 for "no 3-D point"; it is kept as the raw bit pattern
//! ([`NO_POINT3D`]).

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use byteorder::{ByteOrder, LittleEndian};

use crate::cloud::{PointCloud, Vec3};

pub const NO_POINT3D: u64 = u64::MAX;

#[derive(Debug, thiserror::Error)]
pub enum ColmapError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{dir}: neither {stem}.bin nor {stem}.txt exists")]
    MissingFile { dir: PathBuf, stem: &'static str },
    #[error("{file}: truncated while reading {element}")]
    Truncated { file: &'static str, element: String },
    #[error("{file}: {bytes} unexpected bytes after the last record")]
    TrailingData { file: &'static str, bytes: usize },
    #[error("camera {camera_id}: unsupported camera model {model}")]
    UnknownCameraModel { camera_id: u32, model: String },
    #[error("camera {camera_id}: model {model} takes {expected} parameters, got {found}")]
    ParamCount {
        camera_id: u32,
        model: CameraModel,
        expected: usize,
        found: usize,
    },
    #[error("image {image_id} references missing camera {camera_id}")]
    UnknownCamera { image_id: u32, camera_id: u32 },
    #[error("image {image_id} has a zero or non-finite rotation quaternion")]
    DegenerateQuaternion { image_id: u32 },
    #[error("{file}:{line}: {detail}")]
    Text {
        file: &'static str,
        line: usize,
        detail: String,
    },
    #[error("{file}: image {image_id} name is not valid UTF-8")]
    BadName { file: &'static str, image_id: u32 },
}

/// Camera models whose parameters this crate understands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum CameraModel {
    SimplePinhole,
    Pinhole,
    SimpleRadial,
    OpenCv,
}

impl CameraModel {
    pub fn from_id(id: i32) -> Option<Self> {
        Some(match id {
            0 => CameraModel::SimplePinhole,
            1 => CameraModel::Pinhole,
            2 => CameraModel::SimpleRadial,
            4 => CameraModel::OpenCv,
            _ => return None,
        })
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "SIMPLE_PINHOLE" => CameraModel::SimplePinhole,
            "PINHOLE" => CameraModel::Pinhole,
            "SIMPLE_RADIAL" => CameraModel::SimpleRadial,
            "OPENCV" => CameraModel::OpenCv,
            _ => return None,
        })
    }

    pub fn id(self) -> i32 {
        match self {
            CameraModel::SimplePinhole => 0,
            CameraModel::Pinhole => 1,
            CameraModel::SimpleRadial => 2,
            CameraModel::OpenCv => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CameraModel::SimplePinhole => "SIMPLE_PINHOLE",
            CameraModel::Pinhole => "PINHOLE",
            CameraModel::SimpleRadial => "SIMPLE_RADIAL",
            CameraModel::OpenCv => "OPENCV",
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            CameraModel::SimplePinhole => 3,
            CameraModel::Pinhole | CameraModel::SimpleRadial => 4,
            CameraModel::OpenCv => 8,
        }
    }
}

impl fmt::Display for CameraModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Camera {
    pub id: u32,
    pub model: CameraModel,
    pub width: u64,
    pub height: u64,
    pub params: Vec<f64>,
}

impl Camera {
    /// `(fx, fy, cx, cy)`; distortion terms are not part of this.
    pub fn pinhole_intrinsics(&self) -> (f64, f64, f64, f64) {
        let p = &self.params;
        match self.model {
            CameraModel::SimplePinhole | CameraModel::SimpleRadial => (p[0], p[0], p[1], p[2]),
            CameraModel::Pinhole | CameraModel::OpenCv => (p[0], p[1], p[2], p[3]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Keypoint {
    pub xy: [f64; 2],
    pub point3d_id: u64,
}

/// A registered image: world→camera rotation `qvec = [w, x, y, z]` and
/// translation `tvec`.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub id: u32,
    pub qvec: [f64; 4],
    pub tvec: [f64; 3],
    pub camera_id: u32,
    pub name: String,
    pub keypoints: Vec<Keypoint>,
}

/// Sparse points: the colored cloud plus COLMAP's per-point bookkeeping.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparsePoints {
    pub ids: Vec<u64>,
    pub cloud: PointCloud,
    pub errors: Vec<f64>,
    pub tracks: Vec<Vec<(u32, u32)>>,
}

impl SparsePoints {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn track_length(&self, i: usize) -> usize {
        self.tracks[i].len()
    }

    /// Fresh sequential ids starting at 1, zero error and empty tracks.
    pub fn from_cloud(cloud: PointCloud) -> Self {
        let n = cloud.len();
        SparsePoints {
            ids: (1..=n as u64).collect(),
            cloud,
            errors: vec![0.0; n],
            tracks: vec![Vec::new(); n],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SfmModel {
    pub cameras: BTreeMap<u32, Camera>,
    pub images: BTreeMap<u32, Image>,
    pub points: SparsePoints,
}

struct Reader<'a> {
    file: &'static str,
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(file: &'static str, buf: &'a [u8]) -> Self {
        Self { file, buf, pos: 0 }
    }

    fn take(&mut self, n: usize, what: &dyn Fn() -> String) -> Result<&'a [u8], ColmapError> {
        if self.buf.len() - self.pos < n {
            return Err(ColmapError::Truncated {
                file: self.file,
                element: what(),
            });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &dyn Fn() -> String) -> Result<u8, ColmapError> {
        Ok(self.take(1, what)?[0])
    }
    fn u32(&mut self, what: &dyn Fn() -> String) -> Result<u32, ColmapError> {
        Ok(LittleEndian::read_u32(self.take(4, what)?))
    }
    fn i32(&mut self, what: &dyn Fn() -> String) -> Result<i32, ColmapError> {
        Ok(LittleEndian::read_i32(self.take(4, what)?))
    }
    fn u64(&mut self, what: &dyn Fn() -> String) -> Result<u64, ColmapError> {
        Ok(LittleEndian::read_u64(self.take(8, what)?))
    }
    fn f64(&mut self, what: &dyn Fn() -> String) -> Result<f64, ColmapError> {
        Ok(LittleEndian::read_f64(self.take(8, what)?))
    }

    /// Converts a declared count into a capacity no larger than the bytes
    /// left could hold.
    fn bounded(&self, count: u64, record_size: usize) -> usize {
        let left = (self.buf.len() - self.pos) / record_size.max(1);
        usize::try_from(count).unwrap_or(usize::MAX).min(left)
    }

    fn finish(&self) -> Result<(), ColmapError> {
        if self.pos != self.buf.len() {
            return Err(ColmapError::TrailingData {
                file: self.file,
                bytes: self.buf.len() - self.pos,
            });
        }
        Ok(())
    }
}

pub fn parse_cameras_bin(buf: &[u8]) -> Result<BTreeMap<u32, Camera>, ColmapError> {
    let mut r = Reader::new("cameras.bin", buf);
    let count = r.u64(&|| "camera count".into())?;
    let mut out = BTreeMap::new();
    for k in 0..count {
        let what = move || format!("camera #{k}");
        let id = r.u32(&what)?;
        let model_id = r.i32(&what)?;
        let width = r.u64(&what)?;
        let height = r.u64(&what)?;
        let model = CameraModel::from_id(model_id).ok_or_else(|| ColmapError::UnknownCameraModel {
            camera_id: id,
            model: format!("id {model_id}"),
        })?;
        let params = (0..model.num_params())
            .map(|_| r.f64(&|| format!("camera {id} parameters")))
            .collect::<Result<Vec<_>, _>>()?;
        out.insert(
            id,
            Camera {
                id,
                model,
                width,
                height,
                params,
            },
        );
    }
    r.finish()?;
    Ok(out)
}

pub fn parse_images_bin(buf: &[u8]) -> Result<BTreeMap<u32, Image>, ColmapError> {
    let mut r = Reader::new("images.bin", buf);
    let count = r.u64(&|| "image count".into())?;
    let mut out = BTreeMap::new();
    for k in 0..count {
        let what = move || format!("image #{k}");
        let id = r.u32(&what)?;
        let mut qvec = [0.0; 4];
        for q in qvec.iter_mut() {
            *q = r.f64(&what)?;
        }
        let mut tvec = [0.0; 3];
        for t in tvec.iter_mut() {
            *t = r.f64(&what)?;
        }
        let camera_id = r.u32(&what)?;
        let mut name = Vec::new();
        loop {
            let b = r.u8(&|| format!("image {id} name"))?;
            if b == 0 {
                break;
            }
            name.push(b);
        }
        let name = String::from_utf8(name).map_err(|_| ColmapError::BadName {
            file: "images.bin",
            image_id: id,
        })?;
        let n2d = r.u64(&|| format!("image {id} keypoint count"))?;
        let mut keypoints = Vec::with_capacity(r.bounded(n2d, 24));
        for j in 0..n2d {
            let what = move || format!("image {id} keypoint {j}");
            let x = r.f64(&what)?;
            let y = r.f64(&what)?;
            let point3d_id = r.u64(&what)?;
            keypoints.push(Keypoint { xy: [x, y], point3d_id });
        }
        out.insert(
            id,
            Image {
                id,
                qvec,
                tvec,
                camera_id,
                name,
                keypoints,
            },
        );
    }
    r.finish()?;
    Ok(out)
}

pub fn parse_points3d_bin(buf: &[u8]) -> Result<SparsePoints, ColmapError> {
    let mut r = Reader::new("points3D.bin", buf);
    let count = r.u64(&|| "point count".into())?;
    let cap = r.bounded(count, 51);
    let mut pts = SparsePoints {
        ids: Vec::with_capacity(cap),
        cloud: PointCloud {
            positions: Vec::with_capacity(cap),
            colors: Vec::with_capacity(cap),
            ..Default::default()
        },
        errors: Vec::with_capacity(cap),
        tracks: Vec::with_capacity(cap),
    };
    for k in 0..count {
        let what = move || format!("point #{k}");
        let id = r.u64(&what)?;
        let x = r.f64(&what)?;
        let y = r.f64(&what)?;
        let z = r.f64(&what)?;
        let rgb = [r.u8(&what)?, r.u8(&what)?, r.u8(&what)?];
        let error = r.f64(&what)?;
        let len = r.u64(&|| format!("point {id} track length"))?;
        let mut track = Vec::with_capacity(r.bounded(len, 8));
        for j in 0..len {
            let what = move || format!("point {id} track entry {j}");
            track.push((r.u32(&what)?, r.u32(&what)?));
        }
        pts.ids.push(id);
        pts.cloud.positions.push(Vec3::new(x, y, z));
        pts.cloud.colors.push(rgb);
        pts.errors.push(error);
        pts.tracks.push(track);
    }
    r.finish()?;
    Ok(pts)
}

pub fn encode_cameras_bin(cameras: &BTreeMap<u32, Camera>) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&(cameras.len() as u64).to_le_bytes());
    for cam in cameras.values() {
        out.extend_from_slice(&cam.id.to_le_bytes());
        out.extend_from_slice(&cam.model.id().to_le_bytes());
        out.extend_from_slice(&cam.width.to_le_bytes());
        out.extend_from_slice(&cam.height.to_le_bytes());
        for p in &cam.params {
            out.extend_from_slice(&p.to_le_bytes());
        }
    }
    out
}

pub fn encode_images_bin(images: &BTreeMap<u32, Image>) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&(images.len() as u64).to_le_bytes());
    for img in images.values() {
        out.extend_from_slice(&img.id.to_le_bytes());
        for q in img.qvec {
            out.extend_from_slice(&q.to_le_bytes());
        }
        for t in img.tvec {
            out.extend_from_slice(&t.to_le_bytes());
        }
        out.extend_from_slice(&img.camera_id.to_le_bytes());
        out.extend_from_slice(img.name.as_bytes());
        out.push(0);
        out.extend_from_slice(&(img.keypoints.len() as u64).to_le_bytes());
        for kp in &img.keypoints {
            out.extend_from_slice(&kp.xy[0].to_le_bytes());
            out.extend_from_slice(&kp.xy[1].to_le_bytes());
            out.extend_from_slice(&kp.point3d_id.to_le_bytes());
        }
    }
    out
}

pub fn encode_points3d_bin(points: &SparsePoints) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + points.len() * 51);
    out.extend_from_slice(&(points.len() as u64).to_le_bytes());
    for i in 0..points.len() {
        out.extend_from_slice(&points.ids[i].to_le_bytes());
        for a in 0..3 {
            out.extend_from_slice(&points.cloud.positions[i][a].to_le_bytes());
        }
        out.extend_from_slice(&points.cloud.colors[i]);
        out.extend_from_slice(&points.errors[i].to_le_bytes());
        out.extend_from_slice(&(points.tracks[i].len() as u64).to_le_bytes());
        for &(img, idx) in &points.tracks[i] {
            out.extend_from_slice(&img.to_le_bytes());
            out.extend_from_slice(&idx.to_le_bytes());
        }
    }
    out
}

fn text_err(file: &'static str, line: usize, detail: impl Into<String>) -> ColmapError {
    ColmapError::Text {
        file,
        line,
        detail: detail.into(),
    }
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_tok<T: std::str::FromStr>(
    file: &'static str,
    line: usize,
    tok: Option<&str>,
    what: &str,
) -> Result<T, ColmapError> {
    let tok = tok.ok_or_else(|| text_err(file, line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| text_err(file, line, format!("cannot parse {what} from `{tok}`")))
}

/// Parses an id column where COLMAP writes -1 for "none".
fn parse_point_ref(file: &'static str, line: usize, tok: Option<&str>) -> Result<u64, ColmapError> {
    let v: i64 = parse_tok(file, line, tok, "point3D id")?;
    Ok(v as u64)
}

pub fn parse_cameras_txt(text: &str) -> Result<BTreeMap<u32, Camera>, ColmapError> {
    const F: &str = "cameras.txt";
    let mut out = BTreeMap::new();
    for (ln, line) in data_lines(text) {
        let mut t = line.split_whitespace();
        let id: u32 = parse_tok(F, ln, t.next(), "camera id")?;
        let model_name = t.next().ok_or_else(|| text_err(F, ln, "missing model"))?;
        let model = CameraModel::from_name(model_name).ok_or_else(|| ColmapError::UnknownCameraModel {
            camera_id: id,
            model: model_name.to_string(),
        })?;
        let width = parse_tok(F, ln, t.next(), "width")?;
        let height = parse_tok(F, ln, t.next(), "height")?;
        let params = t
            .map(|p| parse_tok(F, ln, Some(p), "parameter"))
            .collect::<Result<Vec<f64>, _>>()?;
        if params.len() != model.num_params() {
            return Err(ColmapError::ParamCount {
                camera_id: id,
                model,
                expected: model.num_params(),
                found: params.len(),
            });
        }
        out.insert(
            id,
            Camera {
                id,
                model,
                width,
                height,
                params,
            },
        );
    }
    Ok(out)
}

pub fn parse_images_txt(text: &str) -> Result<BTreeMap<u32, Image>, ColmapError> {
    const F: &str = "images.txt";
    let mut out = BTreeMap::new();
    // Image lines alternate with keypoint lines, and a keypoint line may be
    // empty, so comments are skipped but blank lines are significant.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('#'));
    while let Some((ln, line)) = lines.next() {
        if line.is_empty() {
            continue;
        }
        let mut t = line.split_whitespace();
        let id: u32 = parse_tok(F, ln, t.next(), "image id")?;
        let mut qvec = [0.0; 4];
        for q in qvec.iter_mut() {
            *q = parse_tok(F, ln, t.next(), "qvec")?;
        }
        let mut tvec = [0.0; 3];
        for v in tvec.iter_mut() {
            *v = parse_tok(F, ln, t.next(), "tvec")?;
        }
        let camera_id = parse_tok(F, ln, t.next(), "camera id")?;
        let name = t.collect::<Vec<_>>().join(" ");
        if name.is_empty() {
            return Err(text_err(F, ln, "missing image name"));
        }
        let mut keypoints = Vec::new();
        if let Some((kln, kline)) = lines.next() {
            let toks: Vec<&str> = kline.split_whitespace().collect();
            if !toks.len().is_multiple_of(3) {
                return Err(text_err(F, kln, "keypoint line is not (x, y, id) triples"));
            }
            for c in toks.chunks(3) {
                keypoints.push(Keypoint {
                    xy: [
                        parse_tok(F, kln, Some(c[0]), "keypoint x")?,
                        parse_tok(F, kln, Some(c[1]), "keypoint y")?,
                    ],
                    point3d_id: parse_point_ref(F, kln, Some(c[2]))?,
                });
            }
        }
        out.insert(
            id,
            Image {
                id,
                qvec,
                tvec,
                camera_id,
                name,
                keypoints,
            },
        );
    }
    Ok(out)
}

pub fn parse_points3d_txt(text: &str) -> Result<SparsePoints, ColmapError> {
    const F: &str = "points3D.txt";
    let mut pts = SparsePoints::default();
    for (ln, line) in data_lines(text) {
        let mut t = line.split_whitespace();
        let id = parse_tok(F, ln, t.next(), "point id")?;
        let x = parse_tok(F, ln, t.next(), "x")?;
        let y = parse_tok(F, ln, t.next(), "y")?;
        let z = parse_tok(F, ln, t.next(), "z")?;
        let rgb = [
            parse_tok(F, ln, t.next(), "red")?,
            parse_tok(F, ln, t.next(), "green")?,
            parse_tok(F, ln, t.next(), "blue")?,
        ];
        let error = parse_tok(F, ln, t.next(), "error")?;
        let rest: Vec<&str> = t.collect();
        if !rest.len().is_multiple_of(2) {
            return Err(text_err(F, ln, "track is not (image id, point2D index) pairs"));
        }
        let track = rest
            .chunks(2)
            .map(|c| {
                Ok((
                    parse_tok(F, ln, Some(c[0]), "track image id")?,
                    parse_tok(F, ln, Some(c[1]), "track point2D index")?,
                ))
            })
            .collect::<Result<Vec<_>, ColmapError>>()?;
        pts.ids.push(id);
        pts.cloud.positions.push(Vec3::new(x, y, z));
        pts.cloud.colors.push(rgb);
        pts.errors.push(error);
        pts.tracks.push(track);
    }
    Ok(pts)
}

fn read_file(path: &Path) -> Result<Vec<u8>, ColmapError> {
    std::fs::read(path).map_err(|source| ColmapError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_part<T: PartialEq>(
    dir: &Path,
    stem: &'static str,
    bin: fn(&[u8]) -> Result<T, ColmapError>,
    txt: fn(&str) -> Result<T, ColmapError>,
) -> Result<T, ColmapError> {
    let bin_path = dir.join(format!("{stem}.bin"));
    let txt_path = dir.join(format!("{stem}.txt"));
    let read_txt = |p: &Path| -> Result<T, ColmapError> {
        let bytes = read_file(p)?;
        let text = String::from_utf8_lossy(&bytes);
        txt(&text)
    };
    match (bin_path.is_file(), txt_path.is_file()) {
        (true, has_txt) => {
            let value = bin(&read_file(&bin_path)?)?;
            if has_txt {
                match read_txt(&txt_path) {
                    Ok(t) if t == value => {}
                    Ok(_) => log::warn!("{stem}: .txt and .bin disagree; using {}", bin_path.display()),
                    Err(e) => log::warn!("{stem}: ignoring unreadable {}: {e}", txt_path.display()),
                }
            }
            Ok(value)
        }
        (false, true) => read_txt(&txt_path),
        (false, false) => Err(ColmapError::MissingFile {
            dir: dir.to_path_buf(),
            stem,
        }),
    }
}

/// Checks image → camera references and normalizes rotations.
///
/// Quaternions already within 1e-6 of unit norm are kept bit-exact.
pub fn validate_model(model: &mut SfmModel) -> Result<(), ColmapError> {
    for img in model.images.values_mut() {
        if !model.cameras.contains_key(&img.camera_id) {
            return Err(ColmapError::UnknownCamera {
                image_id: img.id,
                camera_id: img.camera_id,
            });
        }
        let norm = img.qvec.iter().map(|q| q * q).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(ColmapError::DegenerateQuaternion { image_id: img.id });
        }
        if (norm - 1.0).abs() > 1e-6 {
            log::warn!("image {}: renormalizing rotation with norm {norm}", img.id);
            for q in img.qvec.iter_mut() {
                *q /= norm;
            }
        }
    }
    Ok(())
}

pub fn read_colmap_model(dir: impl AsRef<Path>) -> Result<SfmModel, ColmapError> {
    let dir = dir.as_ref();
    let cameras = read_part(dir, "cameras", parse_cameras_bin, parse_cameras_txt)?;
    let images = read_part(dir, "images", parse_images_bin, parse_images_txt)?;
    let points = read_part(dir, "points3D", parse_points3d_bin, parse_points3d_txt)?;
    let mut model = SfmModel {
        cameras,
        images,
        points,
    };
    validate_model(&mut model)?;
    Ok(model)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ColmapError> {
    std::fs::write(path, bytes).map_err(|source| ColmapError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_points3d_bin(points: &SparsePoints, path: impl AsRef<Path>) -> Result<(), ColmapError> {
    write_file(path.as_ref(), &encode_points3d_bin(points))
}

/// Writes `cameras.bin`, `images.bin` and `points3D.bin` into `dir`.
pub fn write_colmap_model(model: &SfmModel, dir: impl AsRef<Path>) -> Result<(), ColmapError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| ColmapError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    write_file(&dir.join("cameras.bin"), &encode_cameras_bin(&model.cameras))?;
    write_file(&dir.join("images.bin"), &encode_images_bin(&model.images))?;
    write_points3d_bin(&model.points, dir.join("points3D.bin"))
}
