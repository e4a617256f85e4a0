use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid substitution `{input}` at byte {position}: {reason}")]
    Parse {
        input: String,
        position: usize,
        reason: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("prefix too short: need {needed} letters, have {available}")]
    InsufficientPrefix { needed: usize, available: usize },

    #[error("size cap exceeded: {requested} letters requested, cap is {cap}")]
    SizeCap { requested: usize, cap: usize },

    #[error("word set for length {length} did not saturate below the size cap {cap}")]
    Saturation { length: usize, cap: usize },

    #[error("word {word} does not occur within the size cap {cap}")]
    WordNotFound { word: String, cap: usize },

    #[error("substitution is not primitive aperiodic: {0}")]
    NotPrimitiveAperiodic(String),

    #[error("wrong substitution class: {0}")]
    WrongClass(String),

    #[error("density reconstruction failed at base length {length}: {reason}")]
    Reconstruction { length: usize, reason: String },

    #[error("closed form disagrees with the series: {0}")]
    Discrepancy(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
