use thiserror::Error;

/// Errors raised by transforms, solvers and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("expected {expected} coefficients for degree {degree}, got {got}")]
    BadLength {
        degree: usize,
        expected: usize,
        got: usize,
    },

    #[error("field is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("cannot project degree {from} field onto degree {to}")]
    ProjectionDegree { from: usize, to: usize },

    #[error("coefficient tail too short: need degree {needed}, have {available}")]
    MissingCoefficients { needed: usize, available: usize },

    #[error("smoothing profile of kind {found} where {expected} is required")]
    WrongProfile {
        expected: &'static str,
        found: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite tendency at t = {t}")]
    NonFinite { t: f64 },

    #[error("t = {t} is not before the critical time {critical}")]
    PastCriticalTime { t: f64, critical: f64 },

    #[error("root solve failed at x = {x}")]
    RootSolve { x: f64 },

    #[error("state left the domain of the pressure law: v = {v}")]
    OutOfDomain { v: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for SpecError {
    fn from(e: std::io::Error) -> Self {
        SpecError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SpecError>;
