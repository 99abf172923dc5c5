use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand shapes do not line up.
    DimensionMismatch { expected: String, found: String },
    /// A value that must be finite was NaN or infinite.
    NonFinite(&'static str),
    /// A requested rank is zero or exceeds the available dimension.
    InvalidRank { rank: usize, max: usize },
    /// A parameter violates its documented precondition.
    InvalidParameter(String),
    /// A probability tensor entry left `[0, 1]`.
    ProbabilityOutOfRange { index: (usize, usize, usize), value: f64 },
    /// The inverse budget map is undefined (the denominator budget is zero).
    UndefinedPreference,
    /// Rescaling needs every preference strictly positive.
    NotRescalable { node: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::InvalidRank { rank, max } => {
                write!(f, "invalid rank {rank} (must be between 1 and {max})")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::ProbabilityOutOfRange { index, value } => write!(
                f,
                "probability {value} at ({}, {}, {}) is outside [0, 1]",
                index.0 + 1,
                index.1 + 1,
                index.2 + 1
            ),
            Error::UndefinedPreference => {
                write!(f, "preference undefined: the opposite-pair budget is zero")
            }
            Error::NotRescalable { node } => {
                write!(f, "cannot rescale: preference of node {} is zero", node + 1)
            }
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn mismatch(expected: impl fmt::Display, found: impl fmt::Display) -> Error {
    use alloc::string::ToString;
    Error::DimensionMismatch { expected: expected.to_string(), found: found.to_string() }
}

pub(crate) fn invalid(msg: impl fmt::Display) -> Error {
    use alloc::string::ToString;
    Error::InvalidParameter(msg.to_string())
}
