use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid lacunarity ratio {0} (must exceed 1)")]
    InvalidLacunarity(f64),
    #[error("empty sequence")]
    EmptySequence,
    #[error("sequence is not quasi-lacunary: {0}")]
    NotQuasiLacunary(String),
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("exponent {0} not found in sequence")]
    UnknownExponent(f64),
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    AccuracyFailure { estimate: f64, error: f64 },
    #[error("constant undefined: {0}")]
    UndefinedConstant(String),
    #[error("optimizer ({optimizer:e}) disagrees with random sampling ({sampler:e})")]
    Nonconvergence { optimizer: f64, sampler: f64 },
    #[error("truncation certificate failed: dropped tail bound {bound:e}")]
    Truncation { bound: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("config error: {0}")]
    Config(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
