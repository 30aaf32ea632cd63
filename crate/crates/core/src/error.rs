use thiserror::Error;

/// Every failure the laboratory can report.
#[derive(Debug, Error)]
pub enum Error {
    /// A formula was evaluated outside the set where it is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input parameters violate a structural constraint.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// The requested computation would exceed a configured size cap.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("geometry mismatch: expected {expected}, found {found}")]
    GeometryMismatch { expected: String, found: String },

    /// A grid value became NaN or infinite. The solver treats this as a blow-up signal.
    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("Picard iteration is not contracting (ratio {ratio:.3e} for {streak} consecutive iterations)")]
    NonContraction { ratio: f64, streak: usize },

    #[error("Picard iteration did not converge in {0} iterations")]
    IterationCap(usize),

    /// A configuration file failed to parse; `field` is the JSON path of the offending value.
    #[error("{file}: at `{field}`: {message}")]
    Parse { file: String, field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
