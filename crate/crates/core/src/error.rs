use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed class: expected {expected} coordinates, got {got}")]
    MalformedClass { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("unknown {kind} `{id}`")]
    Lookup { kind: &'static str, id: String },

    #[error("move not applicable: {0}")]
    MoveNotApplicable(String),

    #[error("unrealizable embedding: {0}")]
    UnrealizableEmbedding(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("d^2 != 0: {0}")]
    DSquaredNonzero(String),
}

pub type Result<T> = std::result::Result<T, Error>;
