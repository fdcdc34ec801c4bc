//! Gaussian-splat PLY files in the layout common to splat trainers and
//! viewers.
//!
//! Records keep the on-disk parameterization: log-scales, logit opacity,
//! scalar-first rotation (`rot_0` is w) and SH coefficients with `f_rest_*`
//! stored channel-major. Activation happens in
//! [`crate::gaussian::GaussianSplat::from_record`], so a read followed by a
//! write reproduces the file bit for bit.

use std::path::Path;

use super::ply::{read_table, write_table, Column, PlyFormat, PlyTable, ScalarType};
use super::PlyError;

/// Number of `f_rest_*` values for SH degrees 0 through 3.
pub const REST_COUNTS: [usize; 4] = [0, 9, 24, 45];

#[derive(Clone, Debug, PartialEq)]
pub struct SplatRecord {
    pub mean: [f32; 3],
    pub f_dc: [f32; 3],
    /// Higher-band coefficients: all red values, then green, then blue.
    pub f_rest: Vec<f32>,
    pub opacity_logit: f32,
    pub log_scales: [f32; 3],
    /// Quaternion `[w, x, y, z]`, not necessarily normalized.
    pub rotation: [f32; 4],
}

impl SplatRecord {
    /// SH degree implied by the number of `f_rest` values.
    pub fn sh_degree(&self) -> Option<usize> {
        REST_COUNTS.iter().position(|&n| n == self.f_rest.len())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SplatCloudFile {
    pub records: Vec<SplatRecord>,
}

impl SplatCloudFile {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

fn f32_column<'a>(table: &'a PlyTable, name: &str) -> Result<&'a [f32], PlyError> {
    match table.column(name) {
        None => Err(PlyError::MissingProperty(name.to_string())),
        Some(Column::F32(v)) => Ok(v),
        Some(other) => Err(PlyError::PropertyTypeMismatch {
            name: name.to_string(),
            expected: ScalarType::F32.to_string(),
            found: other.scalar_type().to_string(),
        }),
    }
}

/// Whether the vertex element carries splat color coefficients.
pub fn is_splat_ply(bytes: &[u8]) -> bool {
    super::ply::parse_header(bytes)
        .map(|(h, _)| {
            h.elements
                .iter()
                .any(|e| e.name == "vertex" && e.properties.iter().any(|p| p.name == "f_dc_0"))
        })
        .unwrap_or(false)
}

pub fn parse_splat_ply(bytes: &[u8]) -> Result<SplatCloudFile, PlyError> {
    let (_, table) = read_table(bytes, "vertex")?;
    let get = |name: &str| f32_column(&table, name);
    let mean = [get("x")?, get("y")?, get("z")?];
    let dc = [get("f_dc_0")?, get("f_dc_1")?, get("f_dc_2")?];
    let opacity = get("opacity")?;
    let scale = [get("scale_0")?, get("scale_1")?, get("scale_2")?];
    let rot = [get("rot_0")?, get("rot_1")?, get("rot_2")?, get("rot_3")?];

    let declared_rest = table.columns.iter().filter(|(n, _)| n.starts_with("f_rest_")).count();
    let mut rest = Vec::with_capacity(declared_rest);
    for k in 0..declared_rest {
        rest.push(get(&format!("f_rest_{k}"))?);
    }
    if !REST_COUNTS.contains(&declared_rest) {
        return Err(PlyError::MissingProperty(format!(
            "f_rest_* ({declared_rest} present, expected one of {REST_COUNTS:?})"
        )));
    }

    let records = (0..table.count)
        .map(|i| SplatRecord {
            mean: [mean[0][i], mean[1][i], mean[2][i]],
            f_dc: [dc[0][i], dc[1][i], dc[2][i]],
            f_rest: rest.iter().map(|c| c[i]).collect(),
            opacity_logit: opacity[i],
            log_scales: [scale[0][i], scale[1][i], scale[2][i]],
            rotation: [rot[0][i], rot[1][i], rot[2][i], rot[3][i]],
        })
        .collect();
    Ok(SplatCloudFile { records })
}

pub fn read_splat_ply(path: impl AsRef<Path>) -> Result<SplatCloudFile, PlyError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| PlyError::io(path, e))?;
    parse_splat_ply(&bytes)
}

/// Encodes as binary little-endian with properties in trainer order:
/// `x y z f_dc_0..2 f_rest_* opacity scale_0..2 rot_0..3`.
pub fn encode_splat_ply(splats: &SplatCloudFile) -> Result<Vec<u8>, PlyError> {
    let n = splats.len();
    let rest = splats.records.first().map_or(0, |r| r.f_rest.len());
    if let Some(bad) = splats.records.iter().find(|r| r.f_rest.len() != rest) {
        return Err(PlyError::MissingProperty(format!(
            "f_rest_* (records mix {rest} and {} coefficients)",
            bad.f_rest.len()
        )));
    }
    if !REST_COUNTS.contains(&rest) {
        return Err(PlyError::MissingProperty(format!(
            "f_rest_* ({rest} is not a valid count)"
        )));
    }

    let col = |f: &dyn Fn(&SplatRecord) -> f32| Column::F32(splats.records.iter().map(f).collect());
    let mut table = PlyTable::new("vertex", n);
    for a in 0..3 {
        table.push(["x", "y", "z"][a], col(&|r| r.mean[a]));
    }
    for a in 0..3 {
        table.push(format!("f_dc_{a}"), col(&|r| r.f_dc[a]));
    }
    for k in 0..rest {
        table.push(format!("f_rest_{k}"), col(&|r| r.f_rest[k]));
    }
    table.push("opacity", col(&|r| r.opacity_logit));
    for a in 0..3 {
        table.push(format!("scale_{a}"), col(&|r| r.log_scales[a]));
    }
    for a in 0..4 {
        table.push(format!("rot_{a}"), col(&|r| r.rotation[a]));
    }
    let mut out = Vec::new();
    write_table(&mut out, PlyFormat::BinaryLittleEndian, &table, &[]).expect("write to Vec");
    Ok(out)
}

pub fn write_splat_ply(splats: &SplatCloudFile, path: impl AsRef<Path>) -> Result<(), PlyError> {
    let path = path.as_ref();
    let bytes = encode_splat_ply(splats)?;
    std::fs::write(path, bytes).map_err(|e| PlyError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_record() -> SplatRecord {
        SplatRecord {
            mean: [0.0, 1.0, 2.0],
            f_dc: [0.0; 3],
            f_rest: Vec::new(),
            opacity_logit: 0.0,
            log_scales: [0.0; 3],
            rotation: [1.0, 0.0, 0.0, 0.0],
        }
    }

    #[test]
    fn one_splat_round_trip() {
        let file = SplatCloudFile {
            records: vec![unit_record()],
        };
        let bytes = encode_splat_ply(&file).unwrap();
        let back = parse_splat_ply(&bytes).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.records[0].sh_degree(), Some(0));
    }

    #[test]
    fn missing_opacity_is_reported() {
        let text = "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\n\
            property float f_dc_0\nproperty float f_dc_1\nproperty float f_dc_2\n\
            property float scale_0\nproperty float scale_1\nproperty float scale_2\n\
            property float rot_0\nproperty float rot_1\nproperty float rot_2\nproperty float rot_3\nend_header\n\
            0 0 0 0 0 0 0 0 0 1 0 0 0\n";
        match parse_splat_ply(text.as_bytes()) {
            Err(PlyError::MissingProperty(p)) => assert_eq!(p, "opacity"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_order_is_respected() {
        // Same splat, properties declared in a shuffled order with normals.
        let text = "ply\nformat ascii 1.0\nelement vertex 1\n\
            property float rot_0\nproperty float nx\nproperty float opacity\nproperty float x\nproperty float y\nproperty float z\n\
            property float scale_2\nproperty float scale_1\nproperty float scale_0\n\
            property float f_dc_0\nproperty float f_dc_1\nproperty float f_dc_2\n\
            property float rot_1\nproperty float rot_2\nproperty float rot_3\nend_header\n\
            1 9 0 0 1 2 0 0 0 0 0 0 0 0 0\n";
        let back = parse_splat_ply(text.as_bytes()).unwrap();
        assert_eq!(back.records, vec![unit_record()]);
    }

    #[test]
    fn double_properties_rejected() {
        let text = "ply\nformat ascii 1.0\nelement vertex 0\nproperty double x\nend_header\n";
        assert!(matches!(
            parse_splat_ply(text.as_bytes()),
            Err(PlyError::PropertyTypeMismatch { .. })
        ));
    }
}
