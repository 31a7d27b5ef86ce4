use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("malformed XML at byte offset {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("line {line}: {message}")]
    Line { line: usize, message: String },

    #[error("invalid index file: {0}")]
    IndexFormat(String),

    #[error("invalid model file: {0}")]
    ModelFormat(String),

    #[error("cannot build an index from an empty sentence stream")]
    EmptyCorpus,

    #[error("empty concept set")]
    EmptyConcepts,

    #[error("{0}")]
    InvalidArgument(String),

    #[error("generator protocol violation: {message} (response: {excerpt:?})")]
    Protocol { message: String, excerpt: String },

    #[error("generator request failed after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },

    #[error("evaluation ids do not line up; missing: {}", .0.join(", "))]
    IdMismatch(Vec<String>),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn line(line: usize, message: impl Into<String>) -> Self {
        Error::Line {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
