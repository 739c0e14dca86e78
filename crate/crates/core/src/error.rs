use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty bundle")]
    EmptyBundle,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate vector")]
    DegenerateVector,
    #[error("invalid dimension {0}: must be at least 2")]
    InvalidDimension(usize),
    #[error("non-finite component at index {0}")]
    NonFinite(usize),
    #[error("noise sigma must be non-negative and finite, got {0}")]
    InvalidSigma(f64),
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("unknown factor {0}")]
    UnknownFactor(usize),
    #[error("value index {value} out of range for factor {factor} (cardinality {cardinality})")]
    ValueOutOfRange {
        factor: usize,
        value: usize,
        cardinality: usize,
    },
    #[error("object has {found} values, schema has {expected} factors")]
    ArityMismatch { expected: usize, found: usize },
    #[error("empty codebook")]
    EmptyCodebook,
    #[error("k = {k} out of range for codebook of size {size}")]
    TopKOutOfRange { k: usize, size: usize },
    #[error("insufficient distinct pairs: requested {requested}, at most {available} exist")]
    InsufficientPairs { requested: u128, available: u128 },
    #[error("invalid generation mode: {0}")]
    InvalidMode(String),
    #[error("invalid dataset line {line}: {reason}")]
    InvalidDataset { line: usize, reason: String },
    #[error("image is {found_w}x{found_h}, expected {expected_w}x{expected_h}")]
    ImageSize {
        expected_w: usize,
        expected_h: usize,
        found_w: usize,
        found_h: usize,
    },
    #[error("malformed image: {0}")]
    MalformedImage(String),
    #[error("empty change table")]
    EmptyTable,
    #[error("pipeline failed at object {object}, unit {unit:?}, value {value:?}: {source}")]
    Probe {
        object: usize,
        /// `None` for the unmodified baseline.
        unit: Option<usize>,
        value: Option<usize>,
        #[source]
        source: Box<Error>,
    },
    #[error("malformed memory file: {0}")]
    MalformedMemory(String),
    #[error("projection file {path}: {reason}")]
    MalformedProjection { path: PathBuf, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
