use thiserror::Error;

/// Errors raised anywhere in the simulation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical error at step {step}: {msg}")]
    Numerical { step: u64, msg: String },

    #[error("position {x} outside grid [{x_min}, {x_max}]")]
    OutOfDomain { x: f64, x_min: f64, x_max: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("energy {e0} is not below barrier height {v0}")]
    AboveBarrier { e0: f64, v0: f64 },

    #[error("no transmitted paths")]
    NoTransmittedPaths,

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("fit did not converge after {iterations} iterations (best alpha={alpha}, beta={beta})")]
    FitNonConvergence {
        iterations: usize,
        alpha: f64,
        beta: f64,
    },

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
