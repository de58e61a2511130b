use thiserror::Error;

/// Errors raised by graph construction, certificate building and the
/// algebraic bound machinery.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("certificate condition `{condition}` violated: {witness}")]
    Certificate { condition: String, witness: String },

    #[error("protocol check failed: {0}")]
    Protocol(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn limit(msg: impl Into<String>) -> Error {
    Error::ResourceLimit(msg.into())
}
