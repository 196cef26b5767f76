//! Crate-wide error type. Variants distinguish bad input (documents,
//! parameters, coordinates) from degenerate run-time states so callers can
//! map them to different exit codes.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A document violated its schema beyond what serde reports.
    #[error("schema violation: {0}")]
    Schema(String),

    #[error("grid size mismatch: rows x cols = {expected} but document has {actual} cells")]
    GridSizeMismatch { expected: usize, actual: usize },

    #[error("point ({lat}, {lon}) is outside the scene bounds")]
    OutOfBounds { lat: f64, lon: f64 },

    #[error("unknown subcluster id `{0}`")]
    UnknownSubcluster(String),

    #[error("unknown person class `{given}`; valid classes: {valid}")]
    UnknownPersonClass { given: String, valid: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Every cell has zero mass, so no distribution can be formed.
    #[error("degenerate POA: reachability x affinity is zero everywhere")]
    DegeneratePoa,

    #[error("degenerate distribution: all candidate scores are zero")]
    DegenerateScores,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by bad input rather than a failure while
    /// computing or writing results.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::DegeneratePoa | Error::DegenerateScores)
    }
}

pub(crate) fn read_to_string(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(
    path: &std::path::Path,
    text: &str,
) -> Result<T> {
    serde_json::from_str(text).map_err(|source| Error::Parse { path: path.to_path_buf(), source })
}
