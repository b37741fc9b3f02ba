use thiserror::Error;

/// Errors raised by matrix kernels, pencil algebra and constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("variable mismatch: {0}")]
    VariableMismatch(String),

    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    #[error("the set is empty (no interior point found, best margin {margin:.3e})")]
    EmptySet { margin: f64 },

    #[error("invalid witness: {0}")]
    InvalidWitness(String),
}

pub type Result<T> = std::result::Result<T, Error>;
