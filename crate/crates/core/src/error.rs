use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {dim} exceeds the configured maximum {cap}")]
    DimensionLimit { dim: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator is not Hermitian: max |h - h^dagger| = {deviation:e} (tolerance {tol:e})")]
    Hermiticity { deviation: f64, tol: f64 },

    #[error("normalization violated: {what} deviates from 1 by {deviation:e}")]
    Normalization { what: &'static str, deviation: f64 },

    #[error("Schmidt coefficient c[{index}] = {value} is outside (0, 1)")]
    CoefficientRange { index: usize, value: f64 },

    #[error("local dimension must be at least 2, got {0}")]
    Dimension(usize),

    #[error("block angle {value} is outside (0, pi/2) for block {block}")]
    Angle { block: usize, value: f64 },

    #[error("correlation table for setting pair ({x},{y}) is missing")]
    Coverage { x: usize, y: usize },

    #[error("block {block} (primed: {primed}) has vanishing mass {mass:e}")]
    DegenerateBlock { block: usize, primed: bool, mass: f64 },

    #[error("ambiguous rank: eigenvalue {eigenvalue:e} falls between the null and range thresholds")]
    Rank { eigenvalue: f64 },

    #[error("isometry lost norm {loss:e}; criterion operators are inconsistent")]
    IsometryConsistency { loss: f64 },

    #[error("invalid measurement ({context}): {reason}")]
    Measurement { context: String, reason: String },

    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Malformed input or unreadable files, as opposed to well-formed data
    /// that violates a constraint.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Io { .. })
    }
}
