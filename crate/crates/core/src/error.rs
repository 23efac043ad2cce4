use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("usage graph unavailable: source could not be parsed")]
    GraphUnavailable,

    #[error("structural analysis unavailable: {0} side failed to parse")]
    StructureUnavailable(&'static str),

    #[error("source unit has no code lines")]
    EmptyUnit,

    #[error("no API objects found in the context code")]
    NoApiObjects,

    #[error("cannot infer an exception from the context code; pass one explicitly with --exception")]
    UnknownException,

    #[error("candidate pool is empty")]
    EmptyPool,

    #[error("invalid value: {0}")]
    InvalidInput(String),

    #[error("knowledge base line {line}: {reason}")]
    KnowledgeBase { line: usize, reason: String },

    #[error("config error in {path}: {reason}")]
    Config { path: PathBuf, reason: String },

    #[error("no auth token: set {0}")]
    AuthMissing(&'static str),

    #[error("rate limited by the code-search service after {attempts} attempts")]
    RateLimited { attempts: u32 },

    #[error("network failure: {0}")]
    NetworkFailure(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the network or credentials.
    pub fn is_network(&self) -> bool {
        matches!(
            self,
            Error::AuthMissing(_) | Error::RateLimited { .. } | Error::NetworkFailure(_)
        )
    }
}
