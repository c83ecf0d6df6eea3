use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A two-scale diagonal came out nonpositive, so a ratio built on it is
    /// not defined for this sample.
    #[error("undefined estimate: diagonal TSQC values ({diag_a}, {diag_b}) must both be positive")]
    UndefinedEstimate { diag_a: f64, diag_b: f64 },

    #[error("format error: {0}")]
    Format(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config: {0}")]
    Config(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
