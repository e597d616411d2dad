use thiserror::Error;

use crate::domain::SchemeKind;

pub type Result<T> = std::result::Result<T, AocError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AocError {
    #[error("empty PER vector")]
    EmptyPerVector,
    #[error("unreachable success state: device {device} has p = 1")]
    UnreachableSuccess { device: usize },
    #[error("invalid PER {value} for device {device}: must lie in [0, 1)")]
    InvalidProbability { device: usize, value: f64 },
    #[error("invalid timing model: {0}")]
    InvalidTiming(String),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("insufficient renewal intervals: need at least 2 events, got {0}")]
    InsufficientRenewals(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular system")]
    SingularSystem,
    #[error("insufficient collections: {collections} complete collection(s) within {horizon} {unit}")]
    InsufficientCollections {
        collections: usize,
        horizon: u64,
        unit: &'static str,
    },
    #[error("invalid transmission order: {0}")]
    InvalidOrder(String),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("invalid PHY profile: {0}")]
    InvalidPhy(String),
    #[error("per out of range [0,1) at line {line}")]
    PerOutOfRange { line: u64 },
    #[error("unknown scheme token '{token}' at line {line}")]
    UnknownScheme { line: u64, token: String },
    #[error("incomplete device set for ({snr_db} dB, {scheme}): missing device {missing}")]
    IncompleteDeviceSet {
        snr_db: f64,
        scheme: SchemeKind,
        missing: usize,
    },
    #[error("duplicate device {device} for ({snr_db} dB, {scheme}) at line {line}")]
    DuplicateDevice {
        line: u64,
        snr_db: f64,
        scheme: SchemeKind,
        device: usize,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for AocError {
    fn from(err: std::io::Error) -> Self {
        AocError::Io(err.to_string())
    }
}
