use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("connection has torsion: {0}")]
    Torsion(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("curve left the chart domain at t = {t}")]
    LeftDomain { t: f64 },

    #[error("loop is not closed: endpoint gap {gap:e}")]
    NotClosed { gap: f64 },

    #[error("manifest error at `{path}`: {message}")]
    Manifest { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn manifest(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Manifest {
            path: path.into(),
            message: message.into(),
        }
    }
}
