use std::path::PathBuf;

use crate::training::TrainOutcome;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("singular system: normal matrix is not positive definite and lambda = 0")]
    Singular,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("r2 is undefined for a constant target")]
    ConstantTarget,

    #[error("no adjacency pairs: at least two rules are required")]
    NoPairs,

    #[error("training diverged at epoch {epoch}")]
    Diverged {
        epoch: usize,
        partial: Box<TrainOutcome>,
    },

    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error(
        "parse error at data row {row}, column '{column}': cannot parse {value:?} as a number"
    )]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("constant column '{0}' in training partition; min-max scaling is undefined")]
    ConstantColumn(String),

    #[error("unknown synthetic dataset '{0}' (expected two_blob, sinc2d or friedman)")]
    UnknownDataset(String),

    #[error("model file: {0}")]
    Model(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
