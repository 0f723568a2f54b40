use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the supported range [{min}, {max}]")]
    Bound {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("not a ranking: {0}")]
    InvalidRanking(String),

    #[error("label {value} does not encode a ranking of {m} alternatives (only {count} labels are valid)")]
    InvalidLabel { value: u32, m: usize, count: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what}: size {size} exceeds cap {cap}; {hint}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u128,
        hint: &'static str,
    },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("{context}: probabilities sum to {sum}, expected 1")]
    Unnormalized { context: String, sum: f64 },

    #[error("{context}: probability {value} at index {index} is outside [0, 1]")]
    InvalidProbability {
        context: String,
        index: usize,
        value: f64,
    },

    #[error("GMS parameter error: delta = {delta} exceeds 1/|k| = 1/{k} for profile {profile}")]
    GmsParameter {
        delta: f64,
        k: usize,
        profile: String,
    },

    #[error("degenerate renormalization: {0}")]
    Degenerate(String),

    #[error("every shot was discarded as an invalid label")]
    EmptySample,

    #[error("voter {voter}: no valid label after {attempts} re-draws")]
    RedrawLimit { voter: usize, attempts: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
