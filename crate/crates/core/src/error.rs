use thiserror::Error;

/// Failure modes shared by every module.
///
/// The variants map one-to-one onto the CLI exit codes: domain, hypothesis and
/// parse errors exit with 1, resource errors with 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A theorem or lemma hypothesis required by the operation does not hold.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    /// A configured budget (enumeration points, residues, big-integer bits) would be exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// The requested operation is not supported for this kind of input.
    #[error("unsupported: {0}")]
    Capability(String),
    /// Malformed textual input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
