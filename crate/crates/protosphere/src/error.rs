//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A vector with norm at or below the degeneracy epsilon cannot be
    /// normalized. Usually means attribute values or embeddings canceled.
    #[error("zero norm: cannot normalize {context}")]
    ZeroNorm { context: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid dimension {0}: the sphere needs at least 2 coordinates")]
    InvalidDimension(usize),

    #[error("invalid count {0}: need at least 1")]
    InvalidCount(usize),

    #[error("need at least 2 prototypes, got {0}")]
    TooFewPrototypes(usize),

    #[error("need at least {needed} vectors, got {got}")]
    TooFewVectors { needed: usize, got: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: value {value:?} outside the ternary domain {{-1, 0, 1}}")]
    Domain { line: usize, value: String },

    #[error("table has no data rows")]
    EmptyTable,

    #[error("row subset is empty")]
    EmptyRowSet,

    #[error("invalid selection target {requested}: table has {available} attributes")]
    InvalidTarget { requested: usize, available: usize },

    #[error("duplicate class label {0:?}")]
    DuplicateClass(String),

    #[error("size mismatch: {prototypes} prototypes vs {priors} priors")]
    SizeMismatch { prototypes: usize, priors: usize },

    #[error("prototype at position {0} has no class label")]
    UnlabeledPrototype(usize),

    #[error("no prototype for class {0:?}")]
    MissingPrototype(String),

    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("protocol needs {needed} classes, dataset has {available}")]
    InsufficientClasses { needed: usize, available: usize },

    #[error("class {class:?} has {available} examples, protocol needs {needed}")]
    InsufficientExamples {
        class: String,
        needed: usize,
        available: usize,
    },

    #[error("{0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
