use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("relation `{0}` is not part of the template signature")]
    UnknownRelation(String),
    #[error("relation `{relation}` has arity {expected}, got {found} arguments")]
    SignatureMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("malformed tuple in relation `{relation}`: {reason}")]
    MalformedTuple { relation: String, reason: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("domain mismatch: operation on {op} elements, template on {template}")]
    DomainMismatch { op: usize, template: usize },
    #[error("the template does not admit class {0}")]
    ClassMismatch(String),
    #[error("the given set is not a free set")]
    NotFree,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("malformed pattern: {0}")]
    MalformedPattern(String),
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("behavior shape {0} is not available for this base")]
    ShapeUnsupported(String),
    #[error("classification is not supported for base {0}")]
    UnsupportedBase(String),
    #[error("temporal template must contain the strict order relation `1<2`")]
    NotAnExpansion,
    #[error("internal witness check failed: {0}")]
    WitnessCheckFailed(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
