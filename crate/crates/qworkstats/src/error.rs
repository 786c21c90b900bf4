//! Crate-wide error type.

use thiserror::Error;

use crate::measurement::Outcome;

/// Errors raised by operator algebra, model construction, and the
/// thermodynamic bookkeeping built on top of them.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix of size {rows}x{cols} is not square")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix side {side} does not match subsystem dimensions {dims:?}")]
    DimsMismatch { side: usize, dims: Vec<usize> },

    #[error("operator is not Hermitian (violation {violation:.3e})")]
    NonHermitianInput { violation: f64 },

    #[error("operator is not unitary (violation {violation:.3e})")]
    NotUnitary { violation: f64 },

    #[error("subsystem index {index} out of range for {count} subsystems")]
    BadSubsystemIndex { index: usize, count: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not a valid density state: {0}")]
    InvalidState(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid pointer observable: {0}")]
    InvalidPointer(String),

    #[error("unknown outcome {0}")]
    UnknownOutcome(Outcome),

    #[error("effect is not a projector (violation {violation:.3e})")]
    NotProjective { violation: f64 },

    #[error("repeatable spec mismatch: {0}")]
    SpecMismatch(String),

    #[error("rank {rank} times {outcomes} outcomes exceeds apparatus dimension {dim}")]
    RankBound {
        rank: usize,
        outcomes: usize,
        dim: usize,
    },

    #[error("apparatus state is not full rank (min eigenvalue {0:.3e})")]
    NotFullRank(f64),

    #[error("pointer observable does not commute with H_A(tau) (norm {norm:.3e})")]
    CommutatorViolation { norm: f64 },

    #[error("outcome probability {prob:.3e} is below the floor {floor:.3e}")]
    ZeroProbability { prob: f64, floor: f64 },

    #[error("ensemble does not average to the given state (residual {0:.3e})")]
    BadEnsemble(f64),

    #[error("temperature must be positive, got {0}")]
    NonPositiveTemperature(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
