use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch in {op}: {left} vs {right}")]
    Dimension { op: &'static str, left: String, right: String },

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("region is unbounded")]
    Unbounded,

    #[error("unknown signal {0:?}")]
    UnknownSignal(String),

    #[error("retry budget exhausted while drawing {0}")]
    RetriesExhausted(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn dim(op: &'static str, left: impl ToString, right: impl ToString) -> Self {
        Error::Dimension { op, left: left.to_string(), right: right.to_string() }
    }
}
