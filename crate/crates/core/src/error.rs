use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbError {
    #[error("leading coefficient is not a unit")]
    NotAUnit,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("lattice is not stable under b^-1 a")]
    NotAStable,
    #[error("lattice is not contained in the ambient module")]
    NotContained,
    #[error("module is not regular: {0}")]
    NotRegular(String),
    #[error("module does not have a simple pole")]
    NotSimplePole,
    #[error("unsupported spectrum: {0}")]
    UnsupportedSpectrum(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("element is not primitive")]
    NotPrimitive,
    #[error("element is not an eigen-element")]
    NotEigen,
    #[error("no lift exists")]
    NoLift,
    #[error("lift is not unique")]
    NonUniqueLift,
    #[error("not found")]
    NotFound,
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    ParseError { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, AbError>;
