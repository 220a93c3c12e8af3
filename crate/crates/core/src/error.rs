use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("arity mismatch for `{op}`: expected {expected} arguments, got {got}")]
    ArityMismatch { op: String, expected: usize, got: usize },
    #[error("sort mismatch: expected `{expected}`, found `{found}`")]
    SortMismatch { expected: String, found: String },
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("context is not canonical: {0}")]
    NonCanonicalContext(String),
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("unbound clone variable at position {0}")]
    UnboundCloneVariable(usize),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("table too large: {0} rows exceed the cap")]
    TableTooLarge(u128),
    #[error("typing error: {0}")]
    TypingError(String),
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
    #[error("algebra `{model}` violates axiom `{axiom}`")]
    ModelNotAModel { model: String, axiom: String },
    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("bound {0} is too large")]
    BoundTooLarge(usize),
    #[error("syntax error at {line}:{col}: {msg}")]
    SyntaxError { line: usize, col: usize, msg: String },
    #[error("unresolved name `{0}`")]
    UnresolvedName(String),
    #[error("term depth exceeds limit {0}")]
    DepthExceeded(usize),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
}

impl Error {
    /// Short stable identifier of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownSort(_) => "UnknownSort",
            Error::UnknownVariable(_) => "UnknownVariable",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::SortMismatch { .. } => "SortMismatch",
            Error::ContextMismatch(_) => "ContextMismatch",
            Error::NonCanonicalContext(_) => "NonCanonicalContext",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DomainMismatch(_) => "DomainMismatch",
            Error::UnboundCloneVariable(_) => "UnboundCloneVariable",
            Error::SignatureMismatch(_) => "SignatureMismatch",
            Error::TableTooLarge(_) => "TableTooLarge",
            Error::TypingError(_) => "TypingError",
            Error::EndpointMismatch(_) => "EndpointMismatch",
            Error::ModelNotAModel { .. } => "ModelNotAModel",
            Error::NotAHomomorphism(_) => "NotAHomomorphism",
            Error::BoundTooLarge(_) => "BoundTooLarge",
            Error::SyntaxError { .. } => "SyntaxError",
            Error::UnresolvedName(_) => "UnresolvedName",
            Error::DepthExceeded(_) => "DepthExceeded",
            Error::DuplicateName(_) => "DuplicateName",
        }
    }

    pub(crate) fn sort_mismatch(expected: impl std::fmt::Display, found: impl std::fmt::Display) -> Self {
        Error::SortMismatch { expected: expected.to_string(), found: found.to_string() }
    }
}
