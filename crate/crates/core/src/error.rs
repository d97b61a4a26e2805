use std::path::PathBuf;

/// Fatal errors. Per-line and per-row data problems are [`crate::Warning`]s instead.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("read error: {0}")]
    Stream(#[from] std::io::Error),

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: expected header columns {expected:?}, found {found:?}", path.display())]
    Header {
        path: PathBuf,
        expected: Vec<&'static str>,
        found: Vec<String>,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("stage `{stage}` is not a subset of stage `{parent}` (record `{id}`)")]
    StageNotSubset {
        stage: String,
        parent: String,
        id: String,
    },

    #[error("unknown export format `{0}`")]
    UnknownFormat(String),

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
