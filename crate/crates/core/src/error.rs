use alloc::string::String;

use crate::grading::Degree;

/// Errors raised by kernel operations.
///
/// Preconditions that the caller can check are reported as values of this
/// type; nothing in the kernel panics on bad input except the operator
/// overloads on [`Series`](crate::Series), which document that they do.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("degree length mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid signature: {0}")]
    Signature(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("series belong to different jet algebras")]
    AlgebraMismatch,
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("series is not a unit (augmentation is zero)")]
    NonUnit,
    #[error("expected a homogeneous element of degree {expected}")]
    DegreeMismatch { expected: Degree },
    #[error("pullback of degree-zero coordinate `{0}` has nonzero constant term")]
    Basepoint(String),
    #[error("expected {expected} entries, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("domains do not match")]
    DomainMismatch,
    #[error("matrix shape or degree mismatch")]
    Shape,
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not of degree zero")]
    NotDegreeZero,
    #[error("matrix is singular")]
    Singular,
    #[error("morphism is not locally invertible: tangent block {0} is singular")]
    NotLocallyInvertible(Degree),
    #[error("source and target dimensions differ")]
    DimensionsDiffer,
    #[error("morphism is not a submersion at the basepoint")]
    NotSubmersion,
    #[error("morphism is not an immersion at the basepoint")]
    NotImmersion,
    #[error("dimension order violated for this normal form")]
    DimensionOrder,
    #[error("truncation order exceeded: {0}")]
    CapExceeded(String),
    #[error("unsupported variable `{0}`: homotopy operator needs an even coordinate of nonzero degree")]
    UnsupportedVariable(String),
    #[error("form is not closed")]
    NotClosed,
    #[error("form has a weight-zero component and admits no potential")]
    NoPotential,
    #[error("inhomogeneous input")]
    Inhomogeneous,
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;
