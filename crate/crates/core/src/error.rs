use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("type error: {0}")]
    Type(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("index {index} out of bounds for size {size}")]
    Bounds { index: usize, size: usize },

    #[error("value {value} lies outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Bad content in an input file. `row` is 1-based and counts the header.
    #[error("data error in {}{}: {message}", path.display(), row.map(|r| format!(" row {r}")).unwrap_or_default())]
    Data {
        path: PathBuf,
        row: Option<usize>,
        message: String,
    },

    #[error("referential error in {} row {row}: unknown {side} id {id:?}", path.display())]
    Referential {
        path: PathBuf,
        row: usize,
        side: &'static str,
        id: String,
    },

    #[error("parse error in {} row {row}, column {column:?}: {message}", path.display())]
    Parse {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Short machine-readable tag used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Schema(_) => "schema",
            Error::Type(_) => "type",
            Error::Domain(_) => "domain",
            Error::Parameter(_) => "parameter",
            Error::Bounds { .. } => "bounds",
            Error::OutOfRange { .. } => "out_of_range",
            Error::Precondition(_) => "precondition",
            Error::Data { .. } => "data",
            Error::Referential { .. } => "referential",
            Error::Parse { .. } => "parse",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Internal(_) => "internal",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
