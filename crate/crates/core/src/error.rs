use thiserror::Error;

/// Errors surfaced by landscape construction, instance files and reporting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("malformed instance file: {0}")]
    MalformedInstance(String),

    #[error("csv schema mismatch: expected {expected} fields for `{schema}`, got {got}")]
    SchemaMismatch {
        schema: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("cannot aggregate an empty outcome set")]
    EmptyAggregate,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
