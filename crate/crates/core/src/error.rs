//! Crate-wide error type.

/// Errors produced by validation, root searches, and analysis operations.
///
/// Numeric payloads are reported as `f64` regardless of the working scalar.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry")]
    NonFiniteEntry,

    #[error("entry ({row},{col}) = {value} is negative beyond tolerance")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("row {row} sums to {sum}, outside the unit-sum tolerance")]
    RowSumDeviation { row: usize, sum: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("basis does not span the consensus complement (singular or dependent)")]
    SingularBasis,

    #[error("basis vector {index} is not orthogonal to the consensus direction")]
    BasisOutsidePerp { index: usize },

    #[error("no sign change over bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("root search did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("trajectory has not converged")]
    NotConverged,

    #[error("feedback state or value is non-finite")]
    NonFiniteState,

    #[error("derivative unavailable at the requested point")]
    DerivativeUnavailable,

    #[error("infeasible topology schedule: {0}")]
    InfeasibleSchedule(String),

    #[error("bracket expansion failed to find a sign change")]
    BracketExpansionFailed,

    #[error("feedback gain must be positive and finite, got {value}")]
    InvalidGain { value: f64 },

    #[error("invalid utility family: {0}")]
    InvalidUtilities(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
