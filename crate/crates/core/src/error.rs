use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the alignment, QUBO and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed point data at line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("invalid point set: {0}")]
    InvalidPointSet(String),

    #[error("link degree k = {k} must lie in [1, {m}]")]
    InvalidK { k: usize, m: usize },

    #[error("outlier ratio {0} outside [0, 0.5]")]
    InvalidRatio(f64),

    #[error("reference has {reference} points but template has {template}")]
    CardinalityMismatch { reference: usize, template: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point set is not centered (centroid norm {norm:e})")]
    NotCentered { norm: f64 },

    #[error("invalid link set: {0}")]
    InvalidLinks(String),

    #[error("expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{bits} free bits exceed the exhaustive limit of {max}")]
    TooManyBits { bits: usize, max: usize },

    #[error("invalid annealing schedule: {0}")]
    InvalidSchedule(String),

    #[error("clamped bit must be 1")]
    ClampViolated,

    #[error("reference point set has zero norm")]
    ZeroReference,

    #[error("{n} qubits exceed the limit of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("spectral gap {gap:e} at s = {s} is below threshold")]
    DegenerateGap { s: f64, gap: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

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

pub type Result<T> = std::result::Result<T, Error>;
