//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular or too ill-conditioned (rcond {rcond:.3e} <= {threshold:.3e})")]
    SingularMatrix { rcond: f64, threshold: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported cone representation for this operation: {0}")]
    UnsupportedRepresentation(String),

    #[error("cone is not full-dimensional")]
    NotFullDimensional,

    #[error("cone is not pointed")]
    NotPointed,

    #[error("operator failed the properness check (worst margin {worst_margin:.3e})")]
    NotProper { worst_margin: f64 },

    #[error("cone ranges of the combined operators disagree")]
    ConeRangeMismatch,

    #[error("mix weights must be positive and sum to one (got sum {sum})")]
    BadWeights { sum: f64 },

    #[error("base point is not normalized: eval(q, x) = {value}, expected 1")]
    NormalizationError { value: f64 },

    #[error("gauge body is unbounded: direction {witness:?} has no positive facet inner product")]
    BoundednessViolation { witness: Vec<f64> },

    #[error("too many generators for face enumeration: {got} > {max}")]
    TooManyGenerators { got: usize, max: usize },

    #[error("asymmetric-norm axiom check failed: {check}")]
    NormAxiomFailure { check: String },

    #[error("invalid construction: {0}")]
    InvalidConstruction(String),

    #[error("parse error: {0}")]
    ParseError(String),

    #[error("unknown demo id: {0}")]
    UnknownExample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
