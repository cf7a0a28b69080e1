use thiserror::Error;

/// Errors surfaced by evaluation, summation, quadrature, and the CLI layer.
#[derive(Error, Debug)]
pub enum QawError {
    #[error("precision of {digits} decimal digits is below the supported minimum of {min}")]
    InvalidPrecision { digits: u32, min: u32 },

    #[error("base q = {q} is outside the open interval (0, 1)")]
    InvalidBase { q: String },

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("pole encountered: {0}")]
    Pole(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),

    #[error("recurrence coefficient singular: {0}")]
    CoefficientSingularity(String),

    #[error("requested tolerance not reached: {0}")]
    TruncationFailure(String),

    #[error("singular point: {0}")]
    SingularPoint(String),

    #[error("unsupported point: {0}")]
    UnsupportedPoint(String),

    #[error("zero bracketing failed: {0}")]
    BracketFailure(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, QawError>;
