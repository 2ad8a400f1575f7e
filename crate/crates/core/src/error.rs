use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    Dimensions(String),

    #[error("band index {index} out of range for a cube with {bands} bands")]
    BandOutOfRange { index: usize, bands: usize },

    #[error("no labeled pixels")]
    NoLabeledPixels,

    #[error("ground truth has {0} distinct class(es); at least 2 are required")]
    DegenerateGroundTruth(usize),

    #[error("class {class} has {count} labeled pixel(s); stratified splitting needs at least 2")]
    ClassTooSmall { class: u16, count: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input")]
    Empty,

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("invalid probability mass function: {0}")]
    InvalidPmf(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("header parse error: {0}")]
    Header(String),

    #[error("unsupported data type code {0}")]
    UnsupportedDataType(u32),

    #[error("truncated data: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("invalid label data: {0}")]
    Labels(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
