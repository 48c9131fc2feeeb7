use thiserror::Error;

/// Errors raised by the library. Validation failures carry a human-readable
/// reason; the CLI maps [`Error::is_input_error`] to exit code 2.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero vector has no primitive form")]
    ZeroVector,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("polar dual undefined: origin is not in the interior")]
    PolarUndefined,
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("empty input: {0}")]
    Empty(String),
    #[error("invalid nef partition: {0}")]
    InvalidNefPartition(String),
    #[error("invalid subdivision: {0}")]
    InvalidSubdivision(String),
    #[error("not piecewise linear on the given subdivision: {0}")]
    NotPiecewiseLinear(String),
    #[error("conflicting heights at point {0}")]
    ConflictingHeights(String),
    #[error("not convex: {0}")]
    NotConvex(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("subdivision is not fine: {0}")]
    NotFine(String),
    #[error("polytope is not reflexive")]
    NotReflexive,
    #[error("not a tropical space: {0}")]
    InvalidTropicalSpace(String),
    #[error("face is not a boundary face: {0}")]
    NotBoundaryFace(String),
    #[error("cell is not in the discriminant: {0}")]
    NotSingular(String),
    #[error("fibration data inconsistent: {0}")]
    InconsistentFibration(String),
    #[error("gluing data inconsistent: {0}")]
    InconsistentGluing(String),
    #[error("could not certify: {0}")]
    CertificationFailed(String),
    #[error("ambient dimension {dim} exceeds limit {limit}")]
    DimensionLimit { dim: usize, limit: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Errors caused by malformed or out-of-domain input, as opposed to a
    /// well-formed object failing a mathematical check.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::NotConvex(_) | Error::CertificationFailed(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
