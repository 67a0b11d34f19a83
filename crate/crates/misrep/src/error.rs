use thiserror::Error;

/// Crate-wide error type.
///
/// The variants matter to the CLI, which maps them onto exit codes:
/// everything that means "your input is wrong" ends up as a data error,
/// while [`Error::Resource`] marks a refused computation (for example a
/// full `2^N` enumeration on a profile that is too large).
#[derive(Debug, Error)]
pub enum Error {
    /// Two inputs that must agree in length (for example a profile and an
    /// allocation) do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A share, rational, or weight string could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Input data is structurally invalid (malformed fusion group,
    /// duplicated race rows, missing baseline, ...).
    #[error("data error: {0}")]
    Data(String),

    /// The computation was refused because it would exceed a size guard.
    #[error("resource guard: {0}")]
    Resource(String),

    /// A property the theory guarantees failed to hold. Reaching this
    /// variant means a bug, not bad input; it exists so checkers can report
    /// instead of panicking.
    #[error("property violation: {0}")]
    Property(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
