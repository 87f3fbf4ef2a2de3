use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too small: {boundary} boundary needs at least {needed} cells, got {got}")]
    GridTooSmall {
        boundary: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("inadmissible state for {model}: {reason}")]
    Inadmissible { model: &'static str, reason: String },

    #[error("CFL violation: dt = {dt:e} exceeds the stable limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("{0} requires periodic boundaries")]
    UnsupportedBoundary(&'static str),

    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: String, got: usize },

    #[error("cannot reconstruct at x = {0}: point lies on a detected edge")]
    AtEdge(f64),

    #[error("characteristics cross at t* = {breakdown}; requested t = {t}")]
    Breakdown { t: f64, breakdown: f64 },

    #[error("oracle failed to converge: {0}")]
    OracleFailure(String),

    #[error("instability detected at t = {time}: L2 norm {norm:e} exceeds 10x the initial {initial:e}")]
    Instability { time: f64, norm: f64, initial: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
