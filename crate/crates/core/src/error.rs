use thiserror::Error;

/// Errors shared by every solver module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ground set of size {n} exceeds the brute-force cap {cap}")]
    GroundSetTooLarge { n: usize, cap: usize },

    #[error("index {index} out of range for ground set of size {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("ordering is not a permutation of the ground set")]
    NotAPermutation,

    #[error("matrix is not symmetric")]
    AsymmetricMatrix,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("negative curvature detected on coordinates {coords:?}")]
    IndefiniteRestriction { coords: Vec<usize> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite function value at {0}")]
    NonFiniteValue(String),

    #[error("solver stalled: {0}")]
    SolverStalled(String),

    #[error("failed to generate a positive definite instance within {0} attempts")]
    GenerationFailed(usize),

    #[error("column {0} has zero norm and cannot be normalized")]
    ZeroColumn(usize),

    #[error("no grid point satisfies the budget; least violating candidate {candidate} exceeds it by {violation}")]
    NoFeasibleBudget { candidate: String, violation: f64 },

    #[error("infeasible point: {0}")]
    InfeasiblePoint(String),

    #[error("regularization path appears unbounded for coordinate {0}")]
    PathUnbounded(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
