use std::path::PathBuf;

use serde::Serialize;

/// Everything that can go wrong between reading inputs and writing reports.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("column `{0}` is not in the header")]
    MissingColumn(String),

    #[error("header names `{0}` more than once")]
    DuplicateHeader(String),

    #[error("line {line}: count `{value}` is not a non-negative number")]
    BadCount { line: u64, value: String },

    #[error("line {line}: coordinate `{value}` is not a finite number")]
    BadCoordinate { line: u64, value: String },

    #[error("line {line}: expected {expected} fields, found {found}")]
    BadRow { line: u64, expected: usize, found: usize },

    #[error("schema: {0}")]
    Schema(String),

    #[error("{column}: categories not in the declared list: {values:?}")]
    UnknownCategory { column: String, values: Vec<String> },

    #[error("{context}: unknown region `{region}`")]
    UnknownRegion { context: String, region: String },

    #[error("{context}: region `{region}` is paired with itself")]
    SelfPair { context: String, region: String },

    #[error("centroid missing for region `{0}`")]
    MissingCentroid(String),

    #[error("report: {0}")]
    Report(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{source}")]
    Core {
        module: &'static str,
        #[source]
        source: sst_hotspot_core::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Process exit status for a run that failed validation.
pub const EXIT_VALIDATION: u8 = 2;
/// Process exit status for a numerical failure inside the algorithms.
pub const EXIT_NUMERICAL: u8 = 3;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn core(module: &'static str) -> impl FnOnce(sst_hotspot_core::Error) -> Self {
        move |source| Error::Core { module, source }
    }

    /// The module the failure originated in.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Core { module, .. } => module,
            Error::Config(_) => "cli",
            _ => "data-io",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Core { source, .. } if source.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Body<'a> {
            module: &'a str,
            exit_code: u8,
            message: String,
        }
        serde_json::json!({
            "error": Body {
                module: self.module(),
                exit_code: self.exit_code(),
                message: self.to_string(),
            }
        })
    }
}
