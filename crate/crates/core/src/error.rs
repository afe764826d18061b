use crate::scalar::ScalarError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("vector is not in the span of generator words: {0}")]
    NotGenerated(String),
    #[error("unsupported denominator factor: {0}")]
    UnsupportedDenominator(String),
    #[error("parameter '{0}' must be specialized to a rational value first")]
    SymbolicParameter(char),
    #[error("coordinate has vanishing linear coefficient")]
    DegenerateCoordinate,
    #[error("truncation too small: {0}")]
    Truncation(String),
    #[error("section has a pole at an unmarked point: {0}")]
    UnmarkedPole(String),
    #[error("weight-zero space is {0}-dimensional; expected 1")]
    NotCftType(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
