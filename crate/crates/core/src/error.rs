use std::path::PathBuf;

/// Errors raised anywhere in the engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid value: {0}")]
    Invalid(String),

    #[error("unknown concept `{0}`")]
    UnknownConcept(String),

    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("concept `{parent}` referenced as parent of `{child}` does not exist")]
    UnresolvedParent { child: String, parent: String },

    #[error("hierarchy contains a cycle through `{0}`")]
    Cycle(String),

    #[error("predicate hierarchy has {} roots ({}), expected exactly one", .0.len(), .0.join(", "))]
    MultipleRoots(Vec<String>),

    #[error("duplicate identifier `{0}`")]
    Duplicate(String),

    #[error("two statements share the ordered concept pair ({0}, {1})")]
    PairConflict(String, String),

    #[error("statement endpoint `{0}` is not listed among the query concepts")]
    MissingEndpoint(String),

    #[error("document `{doc}`: {reason}")]
    Annotation { doc: String, reason: String },

    #[error("query has {found} tokens, limit is {limit}")]
    TokenLimit { found: usize, limit: usize },

    #[error("topic `{0}` has no relevance judgments")]
    NoJudgments(String),

    #[error("no candidate queries to select from")]
    EmptyInput,

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, reason: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            reason: reason.to_string(),
        }
    }
}
