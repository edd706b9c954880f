use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("input contains no data rows")]
    EmptyInput,

    #[error("invalid series '{id}': {reason}")]
    InvalidSeries { id: String, reason: String },

    #[error("duplicate series id '{0}'")]
    DuplicateId(String),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("series too short: need at least {required} points, got {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("history too short: need at least {required} points, got {actual}")]
    HistoryTooShort { required: usize, actual: usize },

    #[error("period {period} is invalid for a series of length {len}")]
    PeriodTooLarge { period: usize, len: usize },

    #[error("invalid parameter '{name}': {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("covariance not positive definite even with jitter {jitter:e}")]
    NotPositiveDefinite { jitter: f64 },

    #[error("series {index} could not be generated after {attempts} attempts")]
    GenerationFailed { index: usize, attempts: usize },

    #[error("regression design is singular")]
    SingularRegression,

    #[error("not enough training windows: need {required}, have {available}")]
    InsufficientWindows { required: usize, available: usize },

    #[error("duplicate measurement for series '{series_id}', model '{model}'")]
    DuplicateMeasurement { series_id: String, model: String },

    #[error("negative or non-finite metric for series '{series_id}', model '{model}'")]
    NegativeMetric { series_id: String, model: String },

    #[error("performance log is empty")]
    EmptyLog,

    #[error("no profile for logged series '{0}'")]
    MissingProfile(String),

    #[error("store index is empty")]
    EmptyStore,

    #[error("no query series could be retrieved (all stationary or skipped)")]
    NoQueries,

    #[error("unsupported store file: {0}")]
    UnsupportedStore(String),

    #[error("invalid strategy map: {0}")]
    InvalidStrategyMap(String),

    #[error("output file {0} exists (pass --force to overwrite)")]
    OutputExists(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}
