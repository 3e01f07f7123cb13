use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("contraction of a grade-0 element")]
    GradeZero,

    #[error("grade {grade} is out of range for dimension {dim}")]
    GradeOutOfRange { grade: usize, dim: usize },

    #[error("vector is zero")]
    ZeroVector,

    #[error("vector is not isotropic")]
    NotIsotropic,

    #[error("subspace is not isotropic")]
    NotIsotropicSubspace,

    #[error("subspace is not maximal isotropic (dimension {found}, expected {expected})")]
    NotMaximalIsotropic { expected: usize, found: usize },

    #[error("form does not have maximal Witt index {expected} (found {found})")]
    WittIndex { expected: usize, found: usize },

    #[error("bilinear form is degenerate")]
    Degenerate,

    #[error("bilinear form is not symmetric")]
    NotSymmetric,

    #[error("operation needs a hyperbolic basis")]
    NotHyperbolic,

    #[error("multivector is zero")]
    ZeroForm,

    #[error("multivector is not decomposable")]
    NotDecomposable,

    #[error("vectors are linearly dependent")]
    LinearlyDependent,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sampling exhausted: {0}")]
    Exhausted(String),

    #[error("{0}")]
    Parse(#[from] ParseError),
}

/// Parse failure for one of the JSON input formats.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("invalid JSON: {0}")]
    Json(String),

    #[error("term {index}: {message}")]
    Term { index: usize, message: String },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
