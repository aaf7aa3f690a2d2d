use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid coefficient model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("degenerate slope: |P'(x)| = 0")]
    DegenerateSlope,

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
