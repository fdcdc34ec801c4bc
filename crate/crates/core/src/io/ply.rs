//! PLY 1.0 reading and writing (ascii and binary_little_endian).
//!
//! The table layer ([`read_table`] / [`write_table`]) decodes one element of
//! a PLY file into typed columns and is shared by the point-cloud and
//! splat readers. Other elements, and list properties, are skipped record by
//! record; the parser never reads past the declared counts.

use std::fmt;
use std::io::Write;
use std::path::Path;

use byteorder::{ByteOrder, LittleEndian};

use super::PlyError;
use crate::cloud::{PointCloud, Vec3, MID_GRAY};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlyFormat {
    Ascii,
    BinaryLittleEndian,
}

impl PlyFormat {
    fn header_name(self) -> &'static str {
        match self {
            PlyFormat::Ascii => "ascii",
            PlyFormat::BinaryLittleEndian => "binary_little_endian",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarType {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl ScalarType {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "char" | "int8" => ScalarType::I8,
            "uchar" | "uint8" => ScalarType::U8,
            "short" | "int16" => ScalarType::I16,
            "ushort" | "uint16" => ScalarType::U16,
            "int" | "int32" => ScalarType::I32,
            "uint" | "uint32" => ScalarType::U32,
            "float" | "float32" => ScalarType::F32,
            "double" | "float64" => ScalarType::F64,
            _ => return None,
        })
    }

    pub fn size(self) -> usize {
        match self {
            ScalarType::I8 | ScalarType::U8 => 1,
            ScalarType::I16 | ScalarType::U16 => 2,
            ScalarType::I32 | ScalarType::U32 | ScalarType::F32 => 4,
            ScalarType::F64 => 8,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ScalarType::I8 => "char",
            ScalarType::U8 => "uchar",
            ScalarType::I16 => "short",
            ScalarType::U16 => "ushort",
            ScalarType::I32 => "int",
            ScalarType::U32 => "uint",
            ScalarType::F32 => "float",
            ScalarType::F64 => "double",
        }
    }
}

impl fmt::Display for ScalarType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropertyKind {
    Scalar(ScalarType),
    List { count: ScalarType, item: ScalarType },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyDef {
    pub name: String,
    pub kind: PropertyKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementDef {
    pub name: String,
    pub count: usize,
    pub properties: Vec<PropertyDef>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlyHeader {
    pub format: PlyFormat,
    pub elements: Vec<ElementDef>,
    pub comments: Vec<String>,
}

/// One decoded scalar property.
#[derive(Clone, Debug, PartialEq)]
pub enum Column {
    I8(Vec<i8>),
    U8(Vec<u8>),
    I16(Vec<i16>),
    U16(Vec<u16>),
    I32(Vec<i32>),
    U32(Vec<u32>),
    F32(Vec<f32>),
    F64(Vec<f64>),
}

macro_rules! each_column {
    ($col:expr, $v:ident => $body:expr) => {
        match $col {
            Column::I8($v) => $body,
            Column::U8($v) => $body,
            Column::I16($v) => $body,
            Column::U16($v) => $body,
            Column::I32($v) => $body,
            Column::U32($v) => $body,
            Column::F32($v) => $body,
            Column::F64($v) => $body,
        }
    };
}

impl Column {
    fn with_capacity(ty: ScalarType, n: usize) -> Self {
        match ty {
            ScalarType::I8 => Column::I8(Vec::with_capacity(n)),
            ScalarType::U8 => Column::U8(Vec::with_capacity(n)),
            ScalarType::I16 => Column::I16(Vec::with_capacity(n)),
            ScalarType::U16 => Column::U16(Vec::with_capacity(n)),
            ScalarType::I32 => Column::I32(Vec::with_capacity(n)),
            ScalarType::U32 => Column::U32(Vec::with_capacity(n)),
            ScalarType::F32 => Column::F32(Vec::with_capacity(n)),
            ScalarType::F64 => Column::F64(Vec::with_capacity(n)),
        }
    }

    pub fn scalar_type(&self) -> ScalarType {
        match self {
            Column::I8(_) => ScalarType::I8,
            Column::U8(_) => ScalarType::U8,
            Column::I16(_) => ScalarType::I16,
            Column::U16(_) => ScalarType::U16,
            Column::I32(_) => ScalarType::I32,
            Column::U32(_) => ScalarType::U32,
            Column::F32(_) => ScalarType::F32,
            Column::F64(_) => ScalarType::F64,
        }
    }

    pub fn len(&self) -> usize {
        each_column!(self, v => v.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[allow(clippy::unnecessary_cast)]
    pub fn get_f64(&self, i: usize) -> f64 {
        each_column!(self, v => v[i] as f64)
    }

    fn push_le(&mut self, b: &[u8]) {
        match self {
            Column::I8(v) => v.push(b[0] as i8),
            Column::U8(v) => v.push(b[0]),
            Column::I16(v) => v.push(LittleEndian::read_i16(b)),
            Column::U16(v) => v.push(LittleEndian::read_u16(b)),
            Column::I32(v) => v.push(LittleEndian::read_i32(b)),
            Column::U32(v) => v.push(LittleEndian::read_u32(b)),
            Column::F32(v) => v.push(LittleEndian::read_f32(b)),
            Column::F64(v) => v.push(LittleEndian::read_f64(b)),
        }
    }

    fn push_token(&mut self, tok: &str) -> Result<(), ()> {
        fn p<T: std::str::FromStr>(v: &mut Vec<T>, tok: &str) -> Result<(), ()> {
            v.push(tok.parse().map_err(|_| ())?);
            Ok(())
        }
        each_column!(self, v => p(v, tok))
    }

    fn write_le(&self, i: usize, out: &mut Vec<u8>) {
        match self {
            Column::I8(v) => out.push(v[i] as u8),
            Column::U8(v) => out.push(v[i]),
            Column::I16(v) => out.extend_from_slice(&v[i].to_le_bytes()),
            Column::U16(v) => out.extend_from_slice(&v[i].to_le_bytes()),
            Column::I32(v) => out.extend_from_slice(&v[i].to_le_bytes()),
            Column::U32(v) => out.extend_from_slice(&v[i].to_le_bytes()),
            Column::F32(v) => out.extend_from_slice(&v[i].to_le_bytes()),
            Column::F64(v) => out.extend_from_slice(&v[i].to_le_bytes()),
        }
    }

    fn write_ascii(&self, i: usize, out: &mut String) {
        use fmt::Write as _;
        // Display on floats is the shortest representation that parses back
        // to the same bits.
        each_column!(self, v => write!(out, "{}", v[i]).expect("write to String"))
    }
}

/// Scalar columns of one element, in header order.
#[derive(Clone, Debug, PartialEq)]
pub struct PlyTable {
    pub element: String,
    pub count: usize,
    pub columns: Vec<(String, Column)>,
}

impl PlyTable {
    pub fn new(element: impl Into<String>, count: usize) -> Self {
        Self {
            element: element.into(),
            count,
            columns: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, column: Column) {
        debug_assert_eq!(column.len(), self.count);
        self.columns.push((name.into(), column));
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }
}

fn malformed(msg: impl Into<String>) -> PlyError {
    PlyError::MalformedHeader(msg.into())
}

/// Parses the header; returns it with the byte offset of the payload.
pub fn parse_header(bytes: &[u8]) -> Result<(PlyHeader, usize), PlyError> {
    let mut pos = 0usize;
    let mut next_line = || -> Option<&[u8]> {
        if pos >= bytes.len() {
            return None;
        }
        let rest = &bytes[pos..];
        let end = rest.iter().position(|&b| b == b'\n');
        let (line, adv) = match end {
            Some(e) => (&rest[..e], e + 1),
            None => (rest, rest.len()),
        };
        pos += adv;
        Some(line.strip_suffix(b"\r").unwrap_or(line))
    };

    let first = next_line().ok_or_else(|| malformed("empty file"))?;
    if first != b"ply" {
        return Err(malformed("missing `ply` magic"));
    }

    let mut format = None;
    let mut elements: Vec<ElementDef> = Vec::new();
    let mut comments = Vec::new();
    loop {
        let raw = next_line().ok_or_else(|| malformed("missing end_header"))?;
        let line = std::str::from_utf8(raw).map_err(|_| malformed("header is not UTF-8"))?;
        let mut toks = line.split_whitespace();
        match toks.next() {
            None => continue,
            Some("end_header") => break,
            Some("comment") | Some("obj_info") => {
                comments.push(line.split_once(' ').map_or("", |(_, c)| c).to_string())
            }
            Some("format") => {
                let name = toks.next().ok_or_else(|| malformed("format without name"))?;
                let version = toks.next().ok_or_else(|| malformed("format without version"))?;
                if version != "1.0" {
                    return Err(PlyError::UnsupportedFormat(format!("{name} {version}")));
                }
                format = Some(match name {
                    "ascii" => PlyFormat::Ascii,
                    "binary_little_endian" => PlyFormat::BinaryLittleEndian,
                    other => return Err(PlyError::UnsupportedFormat(other.to_string())),
                });
            }
            Some("element") => {
                let name = toks.next().ok_or_else(|| malformed("element without name"))?;
                let count = toks
                    .next()
                    .and_then(|c| c.parse::<usize>().ok())
                    .ok_or_else(|| malformed(format!("element `{name}` has no valid count")))?;
                elements.push(ElementDef {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let elem = elements
                    .last_mut()
                    .ok_or_else(|| malformed("property before any element"))?;
                let t = toks.next().ok_or_else(|| malformed("property without type"))?;
                let kind = if t == "list" {
                    let count = toks.next().and_then(ScalarType::parse);
                    let item = toks.next().and_then(ScalarType::parse);
                    match (count, item) {
                        (Some(count), Some(item)) => PropertyKind::List { count, item },
                        _ => return Err(malformed(format!("bad list property: {line}"))),
                    }
                } else {
                    PropertyKind::Scalar(ScalarType::parse(t).ok_or_else(|| malformed(format!("unknown type `{t}`")))?)
                };
                let name = toks.next().ok_or_else(|| malformed("property without name"))?;
                elem.properties.push(PropertyDef {
                    name: name.to_string(),
                    kind,
                });
            }
            Some(other) => return Err(malformed(format!("unexpected header keyword `{other}`"))),
        }
    }
    let format = format.ok_or_else(|| malformed("missing format line"))?;
    Ok((
        PlyHeader {
            format,
            elements,
            comments,
        },
        pos,
    ))
}

/// Decodes the scalar properties of `element` from a complete PLY file.
pub fn read_table(bytes: &[u8], element: &str) -> Result<(PlyHeader, PlyTable), PlyError> {
    let (header, offset) = parse_header(bytes)?;
    if !header.elements.iter().any(|e| e.name == element) {
        return Err(PlyError::MissingElement(element.to_string()));
    }
    let payload = &bytes[offset..];
    let table = match header.format {
        PlyFormat::BinaryLittleEndian => decode_binary(&header, payload, element)?,
        PlyFormat::Ascii => decode_ascii(&header, payload, element)?,
    };
    Ok((header, table))
}

fn decode_binary(header: &PlyHeader, payload: &[u8], wanted: &str) -> Result<PlyTable, PlyError> {
    let mut pos = 0usize;
    let mut table = None;
    for elem in &header.elements {
        let keep = elem.name == wanted && table.is_none();
        let fixed_stride: Option<usize> = elem
            .properties
            .iter()
            .map(|p| match p.kind {
                PropertyKind::Scalar(t) => Some(t.size()),
                PropertyKind::List { .. } => None,
            })
            .sum();
        let short = |found: usize| PlyError::ElementCountMismatch {
            element: elem.name.clone(),
            declared: elem.count,
            found,
        };

        if !keep {
            if let Some(stride) = fixed_stride {
                let need = stride.checked_mul(elem.count).ok_or_else(|| short(0))?;
                if payload.len() - pos < need {
                    return Err(short((payload.len() - pos) / stride.max(1)));
                }
                pos += need;
                continue;
            }
        } else if let Some(stride) = fixed_stride {
            let available = (payload.len() - pos) / stride.max(1);
            if stride > 0 && available < elem.count {
                return Err(short(available));
            }
        }

        let mut columns: Vec<Option<Column>> = elem
            .properties
            .iter()
            .map(|p| match p.kind {
                PropertyKind::Scalar(t) if keep => Some(Column::with_capacity(t, elem.count)),
                _ => None,
            })
            .collect();
        for record in 0..elem.count {
            for (prop, col) in elem.properties.iter().zip(columns.iter_mut()) {
                match prop.kind {
                    PropertyKind::Scalar(t) => {
                        let end = pos + t.size();
                        if end > payload.len() {
                            return Err(short(record));
                        }
                        if let Some(c) = col {
                            c.push_le(&payload[pos..end]);
                        }
                        pos = end;
                    }
                    PropertyKind::List { count, item } => {
                        let end = pos + count.size();
                        if end > payload.len() {
                            return Err(short(record));
                        }
                        let n = list_len(count, &payload[pos..end]).ok_or_else(|| short(record))?;
                        let skip = n.checked_mul(item.size()).ok_or_else(|| short(record))?;
                        if payload.len() - end < skip {
                            return Err(short(record));
                        }
                        pos = end + skip;
                    }
                }
            }
        }
        if keep {
            let mut t = PlyTable::new(elem.name.clone(), elem.count);
            for (prop, col) in elem.properties.iter().zip(columns) {
                if let Some(c) = col {
                    t.push(prop.name.clone(), c);
                }
            }
            table = Some(t);
        }
    }
    if pos != payload.len() {
        return Err(PlyError::TrailingData {
            bytes: payload.len() - pos,
        });
    }
    Ok(table.expect("element presence checked"))
}

fn list_len(ty: ScalarType, b: &[u8]) -> Option<usize> {
    let n: i64 = match ty {
        ScalarType::I8 => b[0] as i8 as i64,
        ScalarType::U8 => b[0] as i64,
        ScalarType::I16 => LittleEndian::read_i16(b) as i64,
        ScalarType::U16 => LittleEndian::read_u16(b) as i64,
        ScalarType::I32 => LittleEndian::read_i32(b) as i64,
        ScalarType::U32 => LittleEndian::read_u32(b) as i64,
        ScalarType::F32 | ScalarType::F64 => return None,
    };
    usize::try_from(n).ok()
}

fn decode_ascii(header: &PlyHeader, payload: &[u8], wanted: &str) -> Result<PlyTable, PlyError> {
    let text = std::str::from_utf8(payload).map_err(|_| PlyError::BadValue {
        element: wanted.to_string(),
        record: 0,
        detail: "ascii payload is not UTF-8".into(),
    })?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut table = None;
    for elem in &header.elements {
        let keep = elem.name == wanted && table.is_none();
        let mut columns: Vec<Option<Column>> = elem
            .properties
            .iter()
            .map(|p| match p.kind {
                // Capacity is bounded by what the text could possibly hold.
                PropertyKind::Scalar(t) if keep => {
                    Some(Column::with_capacity(t, elem.count.min(payload.len() / 2 + 1)))
                }
                _ => None,
            })
            .collect();
        for record in 0..elem.count {
            let line = lines.next().ok_or_else(|| PlyError::ElementCountMismatch {
                element: elem.name.clone(),
                declared: elem.count,
                found: record,
            })?;
            let bad = |detail: String| PlyError::BadValue {
                element: elem.name.clone(),
                record,
                detail,
            };
            let mut toks = line.split_whitespace();
            for (prop, col) in elem.properties.iter().zip(columns.iter_mut()) {
                match prop.kind {
                    PropertyKind::Scalar(_) => {
                        let tok = toks
                            .next()
                            .ok_or_else(|| bad(format!("missing value for `{}`", prop.name)))?;
                        if let Some(c) = col {
                            c.push_token(tok)
                                .map_err(|_| bad(format!("cannot parse `{tok}` for `{}`", prop.name)))?;
                        }
                    }
                    PropertyKind::List { .. } => {
                        let n: usize = toks
                            .next()
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| bad(format!("bad list length for `{}`", prop.name)))?;
                        for _ in 0..n {
                            toks.next()
                                .ok_or_else(|| bad(format!("short list for `{}`", prop.name)))?;
                        }
                    }
                }
            }
            if toks.next().is_some() {
                return Err(bad("extra values on line".into()));
            }
        }
        if keep {
            let mut t = PlyTable::new(elem.name.clone(), elem.count);
            for (prop, col) in elem.properties.iter().zip(columns) {
                if let Some(c) = col {
                    t.push(prop.name.clone(), c);
                }
            }
            table = Some(t);
        }
    }
    let extra = lines.count();
    if extra > 0 {
        let last = header.elements.last().expect("at least the wanted element");
        return Err(PlyError::ElementCountMismatch {
            element: last.name.clone(),
            declared: last.count,
            found: last.count + extra,
        });
    }
    Ok(table.expect("element presence checked"))
}

/// Serializes a single-element PLY file.
pub fn write_table(
    out: &mut impl Write,
    format: PlyFormat,
    table: &PlyTable,
    comments: &[&str],
) -> std::io::Result<()> {
    let mut head = String::new();
    head.push_str("ply\n");
    head.push_str(&format!("format {} 1.0\n", format.header_name()));
    for c in comments {
        head.push_str(&format!("comment {c}\n"));
    }
    head.push_str(&format!("element {} {}\n", table.element, table.count));
    for (name, col) in &table.columns {
        head.push_str(&format!("property {} {}\n", col.scalar_type(), name));
    }
    head.push_str("end_header\n");
    out.write_all(head.as_bytes())?;

    match format {
        PlyFormat::BinaryLittleEndian => {
            let stride: usize = table.columns.iter().map(|(_, c)| c.scalar_type().size()).sum();
            let mut buf = Vec::with_capacity(stride * table.count);
            for i in 0..table.count {
                for (_, col) in &table.columns {
                    col.write_le(i, &mut buf);
                }
            }
            out.write_all(&buf)
        }
        PlyFormat::Ascii => {
            let mut line = String::new();
            for i in 0..table.count {
                line.clear();
                for (k, (_, col)) in table.columns.iter().enumerate() {
                    if k > 0 {
                        line.push(' ');
                    }
                    col.write_ascii(i, &mut line);
                }
                line.push('\n');
                out.write_all(line.as_bytes())?;
            }
            Ok(())
        }
    }
}

/// Counters produced while loading a point cloud.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub declared: usize,
    pub dropped_non_finite: usize,
}

pub fn read_ply(path: impl AsRef<Path>) -> Result<PointCloud, PlyError> {
    read_ply_with_stats(path).map(|(c, _)| c)
}

pub fn read_ply_with_stats(path: impl AsRef<Path>) -> Result<(PointCloud, LoadStats), PlyError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| PlyError::io(path, e))?;
    let (cloud, stats) = parse_point_cloud(&bytes)?;
    if stats.dropped_non_finite > 0 {
        log::warn!(
            "{}: dropped {} of {} points with non-finite coordinates",
            path.display(),
            stats.dropped_non_finite,
            stats.declared
        );
    }
    Ok((cloud, stats))
}

fn float_column<'a>(table: &'a PlyTable, name: &str) -> Result<&'a Column, PlyError> {
    let col = table
        .column(name)
        .ok_or_else(|| PlyError::MissingProperty(name.to_string()))?;
    match col.scalar_type() {
        ScalarType::F32 | ScalarType::F64 => Ok(col),
        other => Err(PlyError::PropertyTypeMismatch {
            name: name.to_string(),
            expected: "float or double".into(),
            found: other.to_string(),
        }),
    }
}

/// Decodes the vertex element of an in-memory PLY file into a cloud.
pub fn parse_point_cloud(bytes: &[u8]) -> Result<(PointCloud, LoadStats), PlyError> {
    let (_, table) = read_table(bytes, "vertex")?;
    let xs = float_column(&table, "x")?;
    let ys = float_column(&table, "y")?;
    let zs = float_column(&table, "z")?;

    let mut rgb = Vec::new();
    for name in ["red", "green", "blue"] {
        if let Some(col) = table.column(name) {
            match col {
                Column::U8(v) => rgb.push(v),
                other => {
                    return Err(PlyError::PropertyTypeMismatch {
                        name: name.to_string(),
                        expected: "uchar".into(),
                        found: other.scalar_type().to_string(),
                    })
                }
            }
        }
    }
    let has_rgb = match rgb.len() {
        0 => false,
        3 => true,
        _ => return Err(PlyError::MissingProperty("red/green/blue (partial color)".into())),
    };
    let intensity = table.column("intensity").or_else(|| table.column("scalar_intensity"));

    let mut cloud = PointCloud {
        synthetic_colors: !has_rgb,
        intensity: intensity.map(|_| Vec::with_capacity(table.count)),
        ..Default::default()
    };
    cloud.positions.reserve(table.count);
    cloud.colors.reserve(table.count);
    let mut dropped = 0;
    #[allow(clippy::needless_range_loop)]
    for i in 0..table.count {
        let p = Vec3::new(xs.get_f64(i), ys.get_f64(i), zs.get_f64(i));
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
            dropped += 1;
            continue;
        }
        cloud.positions.push(p);
        cloud.colors.push(if has_rgb {
            [rgb[0][i], rgb[1][i], rgb[2][i]]
        } else {
            MID_GRAY
        });
        if let (Some(dst), Some(src)) = (cloud.intensity.as_mut(), intensity) {
            dst.push(src.get_f64(i) as f32);
        }
    }
    Ok((
        cloud,
        LoadStats {
            declared: table.count,
            dropped_non_finite: dropped,
        },
    ))
}

/// Encodes a cloud as float32 xyz + uchar rgb (+ float intensity).
pub fn encode_point_cloud(cloud: &PointCloud, format: PlyFormat) -> Result<Vec<u8>, PlyError> {
    if cloud.is_empty() {
        return Err(PlyError::EmptyCloud);
    }
    let n = cloud.len();
    let mut table = PlyTable::new("vertex", n);
    for axis in 0..3 {
        let col = cloud.positions.iter().map(|p| p[axis] as f32).collect();
        table.push(["x", "y", "z"][axis], Column::F32(col));
    }
    if !cloud.synthetic_colors {
        for ch in 0..3 {
            let col = cloud.colors.iter().map(|c| c[ch]).collect();
            table.push(["red", "green", "blue"][ch], Column::U8(col));
        }
    }
    if let Some(int) = &cloud.intensity {
        table.push("intensity", Column::F32(int.clone()));
    }
    let mut out = Vec::new();
    write_table(&mut out, format, &table, &[]).expect("write to Vec");
    Ok(out)
}

pub fn write_ply(cloud: &PointCloud, path: impl AsRef<Path>, format: PlyFormat) -> Result<(), PlyError> {
    let path = path.as_ref();
    let bytes = encode_point_cloud(cloud, format)?;
    std::fs::write(path, bytes).map_err(|e| PlyError::io(path, e))
}
