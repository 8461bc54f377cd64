//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed term: {0}")]
    MalformedTerm(String),

    #[error("{file}:{line}:{col}: syntax error: {msg}")]
    Syntax {
        file: String,
        line: u64,
        col: u64,
        msg: String,
    },

    #[error("{file}:{line}:{col}: unsupported construct: {what}")]
    Unsupported {
        file: String,
        line: u64,
        col: u64,
        what: String,
    },

    #[error("{file}: invalid UTF-8 at byte offset {offset}")]
    Utf8 { file: String, offset: u64 },

    #[error("{file}:{line}:{col}: unknown prefix `{prefix}:`")]
    UnknownPrefix {
        file: String,
        line: u64,
        col: u64,
        prefix: String,
    },

    #[error("restriction anchor {anchor} is missing {missing}")]
    DanglingRestriction { anchor: String, missing: String },

    #[error("restriction anchor {anchor} has conflicting {what} values")]
    ConflictingRestriction { anchor: String, what: String },

    #[error("blank node {anchor} used as a superclass but never declared a restriction")]
    UndeclaredAnchor { anchor: String },

    #[error("literal {0:?} used as {1}")]
    LiteralInSchema(String, &'static str),

    #[error("instance {instance} typed by blank node {class}")]
    BlankTypeObject { instance: String, class: String },

    #[error("instance {instance} typed by restriction anchor {class}")]
    AnchorTypeObject { instance: String, class: String },

    #[error("unknown root class {0}")]
    UnknownRoot(String),

    #[error("input of {size} triples exceeds the naive fixpoint guard of {limit}")]
    OracleGuard { size: usize, limit: usize },

    #[error("phase `{phase}` exceeded the {timeout_s} s timeout")]
    Timeout { phase: &'static str, timeout_s: u64 },

    #[error("invalid manifest {path}: {msg}")]
    Manifest { path: String, msg: String },

    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Attach a file path to a bare I/O error.
    pub fn from_io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::File {
            path: path.display().to_string(),
            source,
        }
    }
}
