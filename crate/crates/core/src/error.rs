use thiserror::Error;

/// Errors produced by the counting, sampling and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("sequence constraint violated at index {index}: {reason}")]
    ConstraintViolation { index: usize, reason: String },

    #[error("length mismatch: allocation has {y} entries, intersection has {x}")]
    LengthMismatch { y: usize, x: usize },

    #[error("size cap exceeded: {what} requires n <= {cap}, got {got}")]
    CapExceeded { what: &'static str, cap: usize, got: usize },

    #[error("unsupported arguments: {0}")]
    Domain(String),

    #[error("no diagram with n = {n} chords and m = {m} crossings")]
    EmptySupport { n: usize, m: usize },

    #[error("count table needs about {needed} bytes, budget is {budget}; try the mcmc sampler")]
    Capacity { needed: u64, budget: u64 },

    #[error("rejection sampler acceptance rate {rate:.3e} is below {floor:.0e}")]
    LowAcceptance { rate: f64, floor: f64 },

    #[error("mcmc chain produced no hit after {steps} steps (tilt {tilt:.4}, mean crossings {mean_crossings:.1})")]
    Timeout { steps: u64, tilt: f64, mean_crossings: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
