use thiserror::Error;

/// Errors produced by the homogenization library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pattern matrix is singular (determinant 0)")]
    ZeroDeterminant,

    #[error("pattern matrix must be square with {expected} entries, got {found}")]
    MalformedMatrix { expected: usize, found: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid kernel specification: {0}")]
    InvalidSpec(String),

    #[error("frequency {0:?} is not a reduced class representative")]
    NotReduced(Vec<i64>),

    #[error("translates are linearly dependent: bracket sum vanishes at class {0:?}")]
    DegenerateClass(Vec<i64>),

    #[error("no fundamental interpolant: bracket sum of coefficients vanishes at class {0:?}")]
    NoInterpolant(Vec<i64>),

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("acoustic tensor is singular at frequency {0:?}")]
    SingularAcousticTensor(Vec<i64>),

    #[error("coefficient table is not orthonormal (max |m [|c|^2]_h - 1| = {0:e})")]
    KernelNotOrthonormal(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("fixed point iteration did not converge within {max_iter} iterations (last error {last_error:e})")]
    NotConverged { max_iter: usize, last_error: f64 },

    #[error("stiffness is not elliptic (smallest eigenvalue {0:e})")]
    NonElliptic(f64),

    #[error("Cauchy error increased at iteration {iteration}: {previous:e} -> {current:e}")]
    MonotoneViolation {
        iteration: usize,
        previous: f64,
        current: f64,
    },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("pattern mismatch: {0}")]
    PatternMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
