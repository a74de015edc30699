use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("point {at:?} lies in the singular set of {what}")]
    Singular { what: String, at: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value while evaluating {what}")]
    NonFinite { what: String },

    #[error("pole of {what} at u = {u}")]
    Pole { what: String, u: f64 },

    #[error("{what} is complex-valued; use the complex evaluation path")]
    ComplexCodomain { what: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unknown system id `{0}`")]
    UnknownSystem(String),

    #[error("entry {0} has no G solution")]
    NoGSolution(String),

    #[error("outside the domain of {what}: {reason}")]
    Domain { what: String, reason: String },

    #[error("integration halted at t = {t}: {reason}")]
    Halted { t: f64, reason: String },

    #[error("sampling rejected {rejected} of {attempts} candidate points")]
    Rejection { rejected: usize, attempts: usize },

    #[error("{0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
