use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degree {degree} out of range: {reason}")]
    DegreeOutOfRange { degree: usize, reason: String },

    #[error("invalid index tuple {indices:?} for dimension {dimension}")]
    InvalidIndex { indices: Vec<usize>, dimension: usize },

    #[error("dimension {0} exceeds the supported maximum of 64")]
    TooManyDimensions(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("search budget exhausted: {0}")]
    SearchExhausted(String),

    #[error("linear system inconsistent at {point:?}: residual {residual:e}")]
    InconsistentSystem { point: Vec<f64>, residual: f64 },

    #[error("rank drop at probe point {point:?}: rank {rank}, expected {expected}")]
    RankDrop {
        point: Vec<String>,
        rank: usize,
        expected: usize,
    },

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Short machine-readable tag, used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::DegreeOutOfRange { .. } => "degree_out_of_range",
            Error::InvalidIndex { .. } => "invalid_index",
            Error::TooManyDimensions(_) => "too_many_dimensions",
            Error::Parse(_) => "parse",
            Error::Precondition(_) => "precondition",
            Error::SearchExhausted(_) => "search_exhausted",
            Error::InconsistentSystem { .. } => "inconsistent_system",
            Error::RankDrop { .. } => "rank_drop",
            Error::Internal(_) => "internal",
            Error::Io(_) => "io",
            Error::Json(_) => "parse",
        }
    }
}
