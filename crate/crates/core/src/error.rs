use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("vector is not a circulation (imbalance at node {node})")]
    NotACirculation { node: u32 },
    #[error("embedding is not orientable")]
    NotOrientable,
    #[error("embedding is orientable")]
    OrientableInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("Euler genus {genus} exceeds the configured cap {cap}")]
    GenusCapExceeded { genus: usize, cap: usize },
    #[error("LP vertex is not integral")]
    NonIntegralVertex,
    #[error("search box with {points} points exceeds the limit")]
    BoxTooLarge { points: f64 },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("graph is bipartite")]
    BipartiteInput,
    #[error("parse error at {field}: {message}")]
    Parse { field: String, message: String },
    #[error("unsupported schema version {found:?}, expected \"homcirc-v1\"")]
    SchemaVersionMismatch { found: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }
}
