use thiserror::Error;

/// Errors raised by the analytical operations and the file/CLI layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty family: {0} requires a nonempty input")]
    EmptyFamily(&'static str),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("size guard exceeded: {0}")]
    Resource(String),

    #[error("set {set:#b} is shattered, no absent pattern exists")]
    WitnessNotFound { set: u64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
