//! Error type shared across the crate.

use crate::types::AxisId;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("axis length mismatch: x={x}, y={y}, z={z}, expected {expected}")]
    AxisLengthMismatch {
        x: usize,
        y: usize,
        z: usize,
        expected: usize,
    },

    #[error("non-finite sample on axis {axis} at index {index}")]
    NonFiniteSample { axis: AxisId, index: usize },

    #[error("non-finite input: {0}")]
    NonFiniteInput(&'static str),

    #[error("signal too short: {len} samples, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("invalid sampling spec: sample_rate_hz={sample_rate_hz}, n_samples={n_samples}")]
    InvalidSamplingSpec { sample_rate_hz: f64, n_samples: usize },

    #[error("frequency {freq_hz} Hz outside the open interval (0, {nyquist_hz}) Hz")]
    FrequencyOutOfRange { freq_hz: f64, nyquist_hz: f64 },

    #[error("invalid search band ({low}, {high}) Hz for nyquist {nyquist_hz} Hz")]
    InvalidBand { low: f64, high: f64, nyquist_hz: f64 },

    #[error("axes must differ, got {0} twice")]
    SameAxis(AxisId),

    #[error("time shift {dt_s} s exceeds segment duration {duration_s} s")]
    ShiftTooLarge { dt_s: f64, duration_s: f64 },

    #[error("insufficient samples: need {needed}, have {available}")]
    InsufficientSamples { needed: usize, available: usize },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("invalid windowing spec: {0}")]
    InvalidWindowing(String),

    #[error("invalid split ratio: {0}")]
    InvalidRatio(String),

    #[error("no files to split")]
    EmptyFileSet,

    #[error("class {0} has no examples")]
    EmptyClass(String),

    #[error("invalid classifier parameter: {0}")]
    InvalidClassifier(String),

    #[error("invalid feature schema: {0}")]
    InvalidSchema(String),

    #[error("invalid rotor model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: missing columns on line {line}: expected 3 fields, found {found}")]
    CsvMissingColumns {
        path: String,
        line: usize,
        found: usize,
    },

    #[error("{path}: bad number on line {line}, column {column}: {value:?}")]
    CsvBadNumber {
        path: String,
        line: usize,
        column: usize,
        value: String,
    },

    #[error("{path}: bad header value for {key:?}: {value:?}")]
    CsvBadHeader {
        path: String,
        key: String,
        value: String,
    },

    #[error("{path}: sample rate not given by header or override")]
    UnknownSampleRate { path: String },

    #[error("{path}: no data rows")]
    CsvEmpty { path: String },

    #[error("{path}: malformed store: {reason}")]
    BadStore { path: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    BadManifest { path: String, reason: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
