use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("{origin}: unsupported schema_version {found} (expected {expected})")]
    Schema { origin: String, found: i64, expected: i64 },
    #[error("include cycle through {0}")]
    IncludeCycle(String),
    #[error("unknown bundled file {0}")]
    UnknownBundled(String),
    #[error("invalid scenario:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(flapsim_core::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for a numerical abort, 1 for everything the user can fix in the config.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(flapsim_core::Error::NonFinite { .. }) => 2,
            _ => 1,
        }
    }
}

impl From<flapsim_core::Error> for Error {
    fn from(e: flapsim_core::Error) -> Self {
        match e {
            flapsim_core::Error::InvalidScenario(v) => Error::Invalid(v),
            other => Error::Core(other),
        }
    }
}
