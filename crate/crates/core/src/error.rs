use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group order: {0}")]
    InvalidOrder(usize),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("invalid multiplication table: {0}")]
    InvalidGroup(String),

    #[error("invalid bijection: {0}")]
    InvalidBijection(String),

    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite numeric input")]
    NumericInput,

    #[error("degenerate commutant spectrum after {attempts} attempts: {diagnostic}")]
    DegenerateSpectrum { attempts: usize, diagnostic: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("pair ({0}, {1}) is isomorphic; corpus must contain non-isomorphic pairs")]
    IsomorphicPair(String, String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::InvalidOrder(_)
            | Error::InvalidGroup(_)
            | Error::InvalidBijection(_)
            | Error::GroupMismatch(_)
            | Error::ShapeMismatch(_)
            | Error::EmptyCorpus
            | Error::IsomorphicPair(..)
            | Error::Io(_) => 2,
            Error::SizeLimit(_) => 3,
            Error::NumericInput | Error::DegenerateSpectrum { .. } => 4,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
