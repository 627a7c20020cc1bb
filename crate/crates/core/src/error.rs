use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("coordinates do not form a point of the simplex: {0}")]
    NotOnSimplex(String),

    #[error("degenerate triangle (zero area)")]
    DegenerateTriangle,

    #[error("invalid band [{lo}, {hi}]: bounds must satisfy 0 <= lo <= hi")]
    InvalidBand { lo: String, hi: String },

    #[error("series ratio {0} outside [0, 1)")]
    DivergentSeries(String),

    #[error("level {level} exceeds the construction cap {cap}")]
    LevelCap { level: u32, cap: u32 },

    #[error("operation requires level >= {required}, approximation has level {actual}")]
    LevelTooLow { required: u32, actual: u32 },

    #[error("measured mode requires an audit report")]
    MissingAudit,

    #[error("unknown {kind} {name:?} (known: {known})")]
    Unknown {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid render style: {0}")]
    Style(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization failed: {0}")]
    Serialize(String),
}

pub type Result<T> = std::result::Result<T, Error>;
