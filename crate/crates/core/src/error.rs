use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite argument {0}")]
    NonFinite(f64),

    #[error("probability {0} is outside [0, 1]")]
    NotAProbability(f64),

    #[error("quantile undefined at p = {0}; need 0 < p < 1")]
    QuantileDomain(f64),

    #[error("finishing position {0} outside 1..=20")]
    Position(i64),

    #[error("pair covariance matrix is not positive definite (variance {variance}, covariance {covariance})")]
    NotPositiveDefinite { variance: f64, covariance: f64 },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid season configuration: {0}")]
    InvalidConfig(String),

    #[error("need at least {min} simulations for percentile intervals, got {got}")]
    TooFewSimulations { min: usize, got: usize },

    #[error("unknown scenario `{0}` (expected baseline, dominant or rookie)")]
    UnknownScenario(String),

    #[error("rookie benchmark needs a baseline elite-driver summary, got {0}")]
    RookieNotApplicable(String),

    #[error("record `{name}` is a {record}, benchmark is for {benchmark}")]
    CategoryMismatch {
        name: String,
        record: String,
        benchmark: String,
    },

    #[error("no benchmark for record `{name}` ({category})")]
    MissingBenchmark { name: String, category: String },

    #[error("line {line}: field `{field}`: {message}")]
    Row {
        line: u64,
        field: String,
        message: String,
    },

    #[error("line {line}: duplicate entrant `{name}`")]
    DuplicateEntrant { line: u64, name: String },

    #[error("team `{team}`: {message}")]
    TeamAggregation { team: String, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
