use thiserror::Error;

/// Errors raised by instance construction, policies, simulation and the experiment driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("type index {index} out of range for {d} types")]
    TypeOutOfRange { index: usize, d: usize },

    #[error("type set is empty")]
    EmptyTypeSet,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inconsistent round outcome: {0}")]
    InconsistentOutcome(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("scaling fit needs at least 2 usable points, got {0}")]
    InsufficientPoints(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
