//! Readers and writers for PLY point clouds, splat PLY files and COLMAP
//! sparse models.

pub mod colmap;
pub mod ply;
pub mod splat_ply;

use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum PlyError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed PLY header: {0}")]
    MalformedHeader(String),
    #[error("unsupported PLY format `{0}` (only ascii and binary_little_endian 1.0)")]
    UnsupportedFormat(String),
    #[error("element `{element}` declares {declared} records but {found} are present")]
    ElementCountMismatch {
        element: String,
        declared: usize,
        found: usize,
    },
    #[error("{bytes} bytes of data after the last declared element")]
    TrailingData { bytes: usize },
    #[error("property `{name}` is {found}, expected {expected}")]
    PropertyTypeMismatch {
        name: String,
        expected: String,
        found: String,
    },
    #[error("missing mandatory property `{0}`")]
    MissingProperty(String),
    #[error("no `{0}` element in file")]
    MissingElement(String),
    #[error("element `{element}` record {record}: {detail}")]
    BadValue {
        element: String,
        record: usize,
        detail: String,
    },
    #[error("refusing to write an empty cloud")]
    EmptyCloud,
}

impl PlyError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        PlyError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
