use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the domain of an operation.
    #[error("invalid `{name}`: {reason}")]
    Domain { name: &'static str, reason: String },

    /// A metric was requested over an empty outcome collection.
    #[error("cannot aggregate an empty outcome set")]
    EmptyOutcomes,

    /// A configuration file could not be read or failed validation.
    #[error("config `{path}`: {reason}")]
    Config { path: PathBuf, reason: String },

    /// An unknown table identifier was requested.
    #[error("unknown table id `{0}` (expected S1, S2, S3 or S4)")]
    UnknownTable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }
}
