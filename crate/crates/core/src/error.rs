use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("variable x{index} out of range for dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },

    #[error("non-integer exponent at byte {position}")]
    NonIntegerExponent { position: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("empty support")]
    EmptySupport,

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("Newton polytope is not convenient")]
    NotConvenient,

    #[error("face is not incident to the polytope: {0}")]
    FaceNotIncident(String),

    #[error("empty resolution data")]
    EmptyResolution,

    #[error("invalid resolution component: {0}")]
    InvalidResolution(String),

    #[error("invalid cutoff radii a={a}, b={b}")]
    InvalidCutoff { a: f64, b: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature budget exceeded after {panels} panels (error estimate {error:e})")]
    BudgetExceeded { panels: usize, error: f64 },

    #[error("could not bracket a sign change of the phase on the sphere near angle {0}")]
    UnbracketedZero(f64),

    #[error("insufficient samples: need {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
