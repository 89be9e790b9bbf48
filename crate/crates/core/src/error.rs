use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid material model: {0}")]
    Model(String),

    #[error("invalid coefficients: {0}")]
    Coefficients(String),

    #[error("least-squares system is rank deficient (condition estimate {condition:.3e})")]
    RankDeficient { condition: f64 },

    #[error("unstable sample at kh={kh}, theta={theta}: r*sqrt(q)={value} exceeds 1")]
    UnstableSample { kh: f64, theta: f64, value: f64 },

    #[error("non-balanced symbol negative at kh={kh}, theta={theta}: q2={q2}")]
    NegativeSymbol { kh: f64, theta: f64, q2: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("configuration is unstable: Courant number {r_actual:.5} exceeds bound {bound:.5}")]
    StabilityRefused { r_actual: f64, bound: f64 },

    #[error("numerical blow-up detected at step {step}")]
    NumericalAbort { step: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::StabilityRefused { .. } => 3,
            Error::NumericalAbort { .. } => 4,
            Error::Io { .. } => 1,
            _ => 2,
        }
    }
}
