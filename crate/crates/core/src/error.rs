use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} = {value} out of range (max {max})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("eigensolver failed to converge on a {0}x{0} matrix")]
    Eigensolver(usize),

    #[error("outcome probability {0:e} is too small to condition on")]
    ZeroProbability(f64),

    #[error("series too short: covers {covered:.3}, needs at least {required:.3}")]
    SeriesTooShort { covered: f64, required: f64 },

    #[error("convergence gate failed: {0}")]
    ConvergenceGate(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("phase-space grid too small: normalization {0:.5}")]
    GridTooSmall(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::OutOfRange { .. }
            | Error::ShapeMismatch(_)
            | Error::SeriesTooShort { .. }
            | Error::Config(_) => 2,
            Error::Eigensolver(_)
            | Error::ZeroProbability(_)
            | Error::ConvergenceGate(_)
            | Error::Invariant(_)
            | Error::GridTooSmall(_) => 3,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
