use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing dataset file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("{}:{line}: {message}", .file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Format(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("label count {labels} does not match graph count {graphs}")]
    LabelMismatch { labels: usize, graphs: usize },

    #[error("entropy of an all-zero count vector is undefined")]
    EmptyDistribution,

    #[error("class {class} has {members} members, fewer than the {folds} folds requested")]
    TooFewMembers {
        class: usize,
        members: usize,
        folds: usize,
    },

    #[error("non-finite value during training (epoch {epoch}, example {example})")]
    NonFinite { epoch: usize, example: usize },

    #[error("oracle size bound exceeded: {0}")]
    SizeBound(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MissingFile(_) => "missing_file",
            Error::Parse { .. } => "parse",
            Error::Format(_) => "format",
            Error::EmptyDataset => "empty_dataset",
            Error::InvalidConfig { .. } => "invalid_config",
            Error::LabelMismatch { .. } => "label_mismatch",
            Error::EmptyDistribution => "empty_distribution",
            Error::TooFewMembers { .. } => "too_few_members",
            Error::NonFinite { .. } => "non_finite",
            Error::SizeBound(_) => "size_bound",
            Error::Io(_) => "io",
        }
    }
}
