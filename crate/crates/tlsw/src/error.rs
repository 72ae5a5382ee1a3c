//! Error type shared across the crate.

use std::fmt;

/// Errors produced by estimation, simulation and matrix operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The requested (family, vanishing moments) pair has no coefficient table.
    UnsupportedFilter { family: String, vanishing_moments: usize },
    /// A scale depth exceeds what the inputs support.
    DepthExceeded { requested: usize, available: usize },
    /// Difference order outside the supported range.
    UnsupportedOrder { order: usize, max: usize },
    /// Matrix deemed numerically singular (condition number above the guard).
    SingularMatrix { condition: f64, limit: f64 },
    /// Operation applied to an operator matrix of the wrong kind.
    KindMismatch { expected: String, found: String },
    /// Series too short for the requested differencing.
    SeriesTooShort { len: usize, needed: usize },
    /// Series length is not a power of two.
    NonDyadicLength { len: usize },
    /// Array shapes do not conform.
    ShapeMismatch { detail: String },
    /// A whole scale row of coefficient variances is non-positive.
    AllNegativeRow { scale: i32 },
    /// Unknown spectrum or trend preset name.
    UnknownPreset { name: String },
    /// Invalid configuration value.
    InvalidConfig { detail: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnsupportedFilter { family, vanishing_moments } => {
                write!(f, "unsupported filter: {} with {} vanishing moments", family, vanishing_moments)
            }
            Error::DepthExceeded { requested, available } => {
                write!(f, "depth {} exceeds available depth {}", requested, available)
            }
            Error::UnsupportedOrder { order, max } => {
                write!(f, "difference order {} not supported (max {})", order, max)
            }
            Error::SingularMatrix { condition, limit } => {
                write!(f, "matrix numerically singular: condition number {:.3e} exceeds {:.1e}", condition, limit)
            }
            Error::KindMismatch { expected, found } => {
                write!(f, "operator kind mismatch: expected {}, found {}", expected, found)
            }
            Error::SeriesTooShort { len, needed } => {
                write!(f, "series of length {} too short: need more than {}", len, needed)
            }
            Error::NonDyadicLength { len } => {
                write!(f, "series length {} is not a power of two", len)
            }
            Error::ShapeMismatch { detail } => write!(f, "shape mismatch: {}", detail),
            Error::AllNegativeRow { scale } => {
                write!(f, "all coefficient variances non-positive at scale {}", scale)
            }
            Error::UnknownPreset { name } => write!(f, "unknown preset: {}", name),
            Error::InvalidConfig { detail } => write!(f, "invalid configuration: {}", detail),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
