use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error category, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Ingestion,
    Estimator,
    OracleCap,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty table")]
    EmptyTable,

    #[error("ragged column `{column}`: expected {expected} values, found {found}")]
    RaggedColumn {
        column: String,
        expected: usize,
        found: usize,
    },

    #[error("duplicate column name `{0}`")]
    DuplicateName(String),

    #[error("non-numeric cell {cell:?} in column `{column}` at row {row}")]
    NonNumeric {
        column: String,
        row: usize,
        cell: String,
    },

    #[error("target column `{0}` not found")]
    TargetNotFound(String),

    #[error("dataset has no feature columns")]
    NoFeatures,

    #[error(
        "column `{column}` declared discrete but holds {value}, not a code in 0..{cardinality}"
    )]
    InvalidDiscrete {
        column: String,
        value: f64,
        cardinality: u32,
    },

    #[error("feature index {index} out of range for {n_features} features")]
    IndexOutOfRange { index: usize, n_features: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),

    #[error("column `{column}` is continuous; {what} requires discrete columns")]
    ContinuousColumn { column: String, what: &'static str },

    #[error("MINE batch size {batch} exceeds the {n_samples} available samples")]
    BatchTooLarge { batch: usize, n_samples: usize },

    #[error("MINE objective diverged at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("{context}: {source}")]
    Estimation {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{features} features exceeds the exhaustive-search cap of {cap}")]
    CapExceeded { features: usize, cap: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::EmptyTable
            | Error::RaggedColumn { .. }
            | Error::DuplicateName(_)
            | Error::NonNumeric { .. }
            | Error::TargetNotFound(_)
            | Error::NoFeatures
            | Error::InvalidDiscrete { .. }
            | Error::Io(_)
            | Error::Csv(_) => ErrorClass::Ingestion,
            Error::IndexOutOfRange { .. }
            | Error::Config(_)
            | Error::UnknownDataset(_)
            | Error::Json(_) => ErrorClass::Config,
            Error::ContinuousColumn { .. }
            | Error::BatchTooLarge { .. }
            | Error::Divergence { .. } => ErrorClass::Estimator,
            Error::Estimation { source, .. } => match source.class() {
                ErrorClass::OracleCap => ErrorClass::OracleCap,
                _ => ErrorClass::Estimator,
            },
            Error::CapExceeded { .. } => ErrorClass::OracleCap,
        }
    }

    pub(crate) fn context(self, context: impl Into<String>) -> Error {
        Error::Estimation {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
