use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("conditional expectation undefined: P(z = {z}) = 0")]
    UndefinedConditional { z: u64 },

    #[error("posterior underflow at z = {z}: every support point has zero likelihood")]
    Underflow { z: u64 },

    #[error("non-finite value in layer {layer}: {what}")]
    NonFinite { layer: usize, what: String },

    #[error("numeric failure at step {step}: {what}")]
    Numeric { step: usize, what: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid checkpoint: {0}")]
    Checkpoint(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
