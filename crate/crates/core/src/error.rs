//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor argument is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Requested space family is not one of the supported labels.
    #[error("unknown space family: {0}")]
    UnknownFamily(String),

    /// Dimension bookkeeping `dim = rank + sum of multiplicities` failed.
    #[error("dimension bookkeeping failed: dim={dim}, rank={rank}, sum of multiplicities={mult_sum}")]
    DimensionMismatch {
        dim: usize,
        rank: usize,
        mult_sum: usize,
    },

    /// A matrix does not satisfy the invariant of its claimed realization.
    #[error("realization invariant violated: {0}")]
    RealizationInvariant(String),

    /// Operation is not available for this space (wrong rank or no matrix model).
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Quadrature order ladder was exhausted before reaching the accuracy target.
    #[error("quadrature budget exhausted: {0}")]
    QuadratureBudget(String),

    /// Convolution length is below the threshold required by the operation.
    #[error("{what} requires r >= {required}, got r = {actual}")]
    ThresholdNotMet {
        what: String,
        required: usize,
        actual: usize,
    },

    /// Two containers that must have matching lengths do not.
    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    /// Input collection was empty where data is required.
    #[error("empty input: {0}")]
    EmptyInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
