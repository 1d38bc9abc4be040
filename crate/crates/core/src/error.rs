use thiserror::Error;

/// Errors raised by argument validation and the numeric routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("pair ({i},{j}) is not a valid index pair for dimension {n}")]
    InvalidPair { i: usize, j: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("ragged matrix rows")]
    RaggedRows,

    #[error("cost vector must be strictly increasing")]
    CostNotIncreasing,

    #[error("cost vector must have a nonnegative first entry")]
    CostNegative,

    #[error("sign entries must be +1 or -1")]
    InvalidSign,

    #[error("sign pattern has product -1 and is not a point of SO(n)")]
    OddSignPattern,

    #[error("matrix is not a rotation (orthogonality residual {orthogonality:e}, |det - 1| = {determinant:e})")]
    OffManifold {
        orthogonality: f64,
        determinant: f64,
    },

    #[error("degenerate Hessian: eigenvalue {eigenvalue:e} lies within {tolerance:e} of zero")]
    Degenerate { eigenvalue: f64, tolerance: f64 },

    #[error("symmetric eigenvalue iteration did not converge")]
    EigenNoConvergence,

    #[error("polynomial coefficient overflow")]
    Overflow,

    #[error("polynomial coefficients must be nonnegative, found {0}")]
    NegativeCoefficient(i64),
}

pub type Result<T> = std::result::Result<T, Error>;
