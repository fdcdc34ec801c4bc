//! Run manifests: what went in, what came out, and content hashes of both.
//!
//! Files are recorded by name only, so two runs on the same inputs produce
//! identical manifests regardless of where their directories live.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const MANIFEST_SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} exists with different content; pass --force to replace it")]
    WouldOverwrite(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_bytes(name: impl Into<String>, bytes: &[u8]) -> FileDigest {
    FileDigest {
        name: name.into(),
        bytes: bytes.len() as u64,
        sha256: sha256_hex(bytes),
    }
}

pub fn digest_file(path: impl AsRef<Path>) -> Result<FileDigest, ManifestError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(digest_bytes(name, &bytes))
}

/// Digest of every regular file directly inside `dir`, sorted by name.
pub fn digest_dir(dir: impl AsRef<Path>) -> Result<Vec<FileDigest>, ManifestError> {
    let dir = dir.as_ref();
    let io = |source| ManifestError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    paths.iter().map(digest_file).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, FileDigest>,
    pub outputs: BTreeMap<String, FileDigest>,
    pub summary: serde_json::Value,
}

impl Manifest {
    pub fn new(command: impl Into<String>) -> Self {
        Manifest {
            schema: MANIFEST_SCHEMA,
            command: command.into(),
            config: serde_json::Value::Null,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            summary: serde_json::Value::Null,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Writes `bytes` to `path` unless a file with different content is
/// already there and `force` is off.
pub fn write_guarded(path: impl AsRef<Path>, bytes: &[u8], force: bool) -> Result<(), ManifestError> {
    let path = path.as_ref();
    if let Ok(existing) = std::fs::read(path) {
        if existing == bytes {
            return Ok(());
        }
        if !force {
            return Err(ManifestError::WouldOverwrite(path.to_path_buf()));
        }
    }
    std::fs::write(path, bytes).map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })
}
