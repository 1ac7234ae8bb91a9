use std::path::{Path, PathBuf};

use urbanblock_core::{IngestError, MetricsError, RasterError, ValidateError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: invalid JSON: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{}: invalid TOML: {source}", path.display())]
    Toml {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("{}: unreadable image: {message}", path.display())]
    Image { path: PathBuf, message: String },
    #[error("{}: unsupported schema_version {found} (expected {expected})", path.display())]
    Schema {
        path: PathBuf,
        found: u32,
        expected: u32,
    },
    #[error("ingest: {0}")]
    Ingest(#[from] IngestError),
    #[error("raster: {0}")]
    Raster(#[from] RasterError),
    #[error("metrics: {0}")]
    Metrics(#[from] MetricsError),
    #[error("validate: {0}")]
    Validate(#[from] ValidateError),
    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(path: &Path, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }
}
