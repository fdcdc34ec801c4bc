use std::path::Path;

use serde::Serialize;

use crate::fusion::FusionError;
use crate::gaussian::GaussianError;
use crate::io::colmap::ColmapError;
use crate::io::PlyError;
use crate::manifest::ManifestError;
use crate::metrics::MetricsError;
use crate::registration::RegistrationError;
use crate::render::RenderError;
use crate::spatial::SpatialError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    MissingInput,
    ColorlessInput,
    InstanceTooLarge,
    InvalidConfig,
    InvalidInput,
    UnmatchedImages,
    UnknownImage,
    RegistrationFailed,
    WouldOverwrite,
    Io,
}

/// What the CLI reports on standard error before exiting with status 1.
#[derive(Clone, Debug, Serialize)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
            details: Vec::new(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::new(not_found(&e), format!("{}: {e}", path.display()))
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Envelope<'a> {
            schema: u32,
            error: &'a CliError,
        }
        serde_json::to_string(&Envelope { schema: 1, error: self }).expect("error serializes")
    }
}

fn not_found(e: &std::io::Error) -> ErrorKind {
    if e.kind() == std::io::ErrorKind::NotFound {
        ErrorKind::MissingInput
    } else {
        ErrorKind::Io
    }
}

impl From<PlyError> for CliError {
    fn from(e: PlyError) -> Self {
        let kind = match &e {
            PlyError::Io { source, .. } => not_found(source),
            _ => ErrorKind::InvalidInput,
        };
        CliError::new(kind, e.to_string())
    }
}

fn colmap_kind(e: &ColmapError) -> ErrorKind {
    match e {
        ColmapError::Io { source, .. } => not_found(source),
        ColmapError::MissingFile { .. } => ErrorKind::MissingInput,
        _ => ErrorKind::InvalidInput,
    }
}

impl From<ColmapError> for CliError {
    fn from(e: ColmapError) -> Self {
        CliError::new(colmap_kind(&e), e.to_string())
    }
}

impl From<RegistrationError> for CliError {
    fn from(e: RegistrationError) -> Self {
        let kind = match &e {
            RegistrationError::Io { source, .. } => not_found(source),
            RegistrationError::CorrespondenceSyntax { .. } => ErrorKind::InvalidInput,
            RegistrationError::InvalidParameter(_) => ErrorKind::InvalidConfig,
            _ => ErrorKind::RegistrationFailed,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<FusionError> for CliError {
    fn from(e: FusionError) -> Self {
        let kind = match &e {
            FusionError::ColorlessInput => ErrorKind::ColorlessInput,
            FusionError::InvalidConfig(_) => ErrorKind::InvalidConfig,
            FusionError::Io { source, .. } => not_found(source),
            FusionError::Colmap(inner) => colmap_kind(inner),
            _ => ErrorKind::InvalidInput,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        let kind = match &e {
            MetricsError::InstanceTooLarge { .. } => ErrorKind::InstanceTooLarge,
            MetricsError::ColorlessCloud(_) => ErrorKind::ColorlessInput,
            MetricsError::InvalidParameter(_) => ErrorKind::InvalidConfig,
            _ => ErrorKind::InvalidInput,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        let kind = match &e {
            RenderError::Io { source, .. } => not_found(source),
            _ => ErrorKind::InvalidInput,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<GaussianError> for CliError {
    fn from(e: GaussianError) -> Self {
        CliError::new(ErrorKind::InvalidInput, e.to_string())
    }
}

impl From<SpatialError> for CliError {
    fn from(e: SpatialError) -> Self {
        CliError::new(ErrorKind::InvalidInput, e.to_string())
    }
}

impl From<ManifestError> for CliError {
    fn from(e: ManifestError) -> Self {
        let kind = match &e {
            ManifestError::Io { source, .. } => not_found(source),
            ManifestError::WouldOverwrite(_) => ErrorKind::WouldOverwrite,
        };
        CliError::new(kind, e.to_string())
    }
}
