use thiserror::Error;

/// Errors reported by the library.
///
/// Infinite results are not errors; they travel through [`crate::ExtReal`]
/// or [`crate::thermo::Quantity`] instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative solver did not reach its tolerance.
    #[error("no convergence: {0}")]
    NonConvergence(String),
    /// A formula hits a singular point (for example `W'` at `-1/e`).
    #[error("singular point: {0}")]
    Singular(String),
    /// A requested enumeration is larger than the configured cap.
    #[error("size limit: {0}")]
    Size(String),
    /// The operation is not defined for the requested model.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
