use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("empty loop on line {line}: a trace needs at least one loop letter")]
    EmptyLoop { line: usize },

    #[error("unsupported fragment: {0}")]
    UnsupportedFragment(String),

    /// The question itself has no known decision procedure.
    #[error("open problem: {0}")]
    UnsupportedOpenProblem(String),

    #[error("name collision: `{0}` already occurs")]
    NameCollision(String),

    #[error("unknown generalised atom `@{0}`")]
    UnknownAtom(String),

    #[error("generalised atom `@{0}` is already registered")]
    DuplicateName(String),

    #[error("generalised atom `@{name}` expects {expected} arguments, got {got}")]
    AtomArity {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("{what} exceeds the configured bound {limit}")]
    BoundExceeded { what: String, limit: u64 },

    #[error("shift-vector grid of {size} points exceeds the budget {limit}")]
    VectorSpaceExceeded { size: u128, limit: u64 },

    #[error("malformed Kripke structure: {0}")]
    MalformedStructure(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("formula is not propositional: {0}")]
    NonPropositional(String),

    #[error("sentence is not in the single-universal fragment")]
    NotForallFragment,
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn bound(what: impl Into<String>, limit: u64) -> Self {
        Error::BoundExceeded {
            what: what.into(),
            limit,
        }
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::UnsupportedFragment(msg.into())
    }
}
