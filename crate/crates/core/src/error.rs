use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: achieved error estimate {achieved:e} (requested {requested:e})")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("polar angle undefined at origin")]
    PolarOrigin,

    #[error("(W1) violated: {0}")]
    W1Violation(String),

    #[error("(f2) violated: {0}")]
    F2Violation(String),

    #[error("input-domain error: {0}")]
    Domain(String),

    #[error("startup failed after {shrinks} radius reductions (last correction {correction:e})")]
    Startup { shrinks: usize, correction: f64 },

    #[error("no {k}-node solution found: {reason}")]
    NotFound { k: usize, reason: String },

    #[error("Undecided region at lambda = {lambda}: {reason}")]
    Undecided { lambda: f64, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
