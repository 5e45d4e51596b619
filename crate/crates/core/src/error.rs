use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::term::TermId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("IRI must not be empty")]
    EmptyIri,
    #[error("blank node label must not be empty")]
    EmptyBlankLabel,
    #[error("language tag must not be empty")]
    EmptyLanguage,
    #[error("literal has both datatype <{0}> and a language tag")]
    DatatypeAndLanguage(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DictionaryError {
    #[error("invalid term: {0}")]
    Invalid(#[from] TermError),
    #[error("term id {0} is reserved")]
    Reserved(TermId),
    #[error("term id {id} was issued by dictionary {found:#06x}, not {expected:#06x}")]
    ForeignId { id: TermId, expected: u16, found: u16 },
    #[error("unknown term id {0}")]
    Unknown(TermId),
    #[error("term id {0} duplicates an earlier entry")]
    Duplicate(TermId),
    #[error("dictionary is sealed")]
    Sealed,
    #[error("dictionary id space exhausted")]
    Exhausted,
}

/// A malformed N-Triples statement.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("line {line}: {source}")]
    Dictionary {
        line: usize,
        source: DictionaryError,
    },
    #[error("I/O error while reading input: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("integrity error in {path}: {message}")]
    Integrity { path: PathBuf, message: String },
    #[error("store at {0} has a partial-load marker and is unusable")]
    PartialLoad(PathBuf),
    #[error("store at {0} already exists; refusing to overwrite")]
    AlreadyExists(PathBuf),
    #[error("no store found at {0}")]
    Missing(PathBuf),
    #[error(transparent)]
    Dictionary(#[from] DictionaryError),
}

impl StoreError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        StoreError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn integrity(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        StoreError::Integrity {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("topology graph is sealed")]
    Sealed,
    #[error("topology graph is not sealed")]
    NotSealed,
}

/// SPARQL syntax error with position and the set of tokens that would have
/// been accepted.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("line {line}, column {column}: expected {}, found {found}", expected.join(" | "))]
    Syntax {
        line: usize,
        column: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("line {line}, column {column}: unknown prefix '{prefix}:'")]
    UnknownPrefix {
        line: usize,
        column: usize,
        prefix: String,
    },
    #[error("projected variable ?{0} does not occur in the WHERE clause")]
    UnboundProjection(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("path length horizon must be at least 1, got {0}")]
    PathLength(u32),
    #[error("densification constant c must satisfy 1 < c <= 2, got {0}")]
    Densification(f64),
    #[error("p clamp value must lie in (0, 1], got {0}")]
    Clamp(f64),
}

#[derive(Debug, Error)]
pub enum ExecError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("join-based path evaluation exceeded its budget of {0} intermediate rows")]
    JoinBudget(u64),
}

/// Failure anywhere between query text and result rows.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Exec(#[from] ExecError),
}
