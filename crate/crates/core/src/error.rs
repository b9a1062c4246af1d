//! Error type shared across the crate.

use crate::solver::Interrupted;

/// Everything that can go wrong while building data sets or running a fit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("data point {index} is invalid: {reason}")]
    InvalidData { index: usize, reason: String },

    #[error("at least {required} data points are required, got {m}")]
    InsufficientData { m: usize, required: usize },

    #[error("no positive pivot available in the entering column")]
    NonPositivePivot,

    #[error("tableau has not converged")]
    NotConverged,

    #[error("iteration limit of {limit} exceeded")]
    IterationLimitExceeded { limit: usize, partial: Box<Interrupted> },

    #[error("cycling detected after {} iterations (SAR oscillates without progress)", partial.iterations.len())]
    CyclingDetected { partial: Box<Interrupted> },

    #[error("least-squares system is singular (abscissas do not span a line)")]
    SingularL2,

    #[error("data sets differ in length, abscissas, or weights")]
    ShapeMismatch,

    #[error("cannot scale: max |t| or max |d| is zero")]
    DegenerateScale,

    #[error("all abscissas are equal; no line through two distinct points exists")]
    DegenerateAbscissas,

    #[error("empty sample has no median")]
    EmptySample,

    #[error("equal-spacing classification requires m >= 4, got {m}")]
    InvalidM { m: usize },

    #[error("CPI window L{length}S{start} is out of range")]
    OutOfRange { length: usize, start: usize },

    #[error("unknown fixture `{name}`")]
    UnknownFixture { name: String },

    #[error("CSV parse error at line {line_no}: {reason}")]
    ParseError { line_no: usize, reason: String },

    #[error("non-positive weight at line {line_no}")]
    NonPositiveWeight { line_no: usize },

    #[error("input contains no data rows")]
    EmptyFile,
}

pub type Result<T> = std::result::Result<T, Error>;
