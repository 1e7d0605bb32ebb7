use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type. Variants are grouped by what went wrong rather
/// than by module, so the CLI can map them onto its exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad parameters: out-of-range knobs, contradictory settings, unparsable
    /// config values.
    #[error("config: {0}")]
    Config(String),

    /// A file that did not parse. Carries the location so the offending line
    /// can be found.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// Structurally valid input that violates a data invariant (duplicate
    /// ids, dimension mismatches, empty corpora, degenerate numerics).
    #[error("{0}")]
    Data(String),

    /// Embedding endpoint or cache failures.
    #[error("embedder: {0}")]
    Embedder(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Data(format!("csv: {e}"))
    }
}

impl Error {
    /// Process exit code for the CLI: 2 config, 3 data, 4 embedder.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Parse { .. } | Error::Data(_) | Error::Io(_) => 3,
            Error::Embedder(_) => 4,
        }
    }
}
