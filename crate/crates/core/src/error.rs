use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error in {func}: {reason}")]
    Domain { func: &'static str, reason: String },

    /// A scenario parameter failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Geometry that cannot define a direction (coincident points).
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// The pilot observation covariance cannot be inverted.
    #[error("observation covariance is singular")]
    SingularCovariance,

    /// A quantity that must be strictly positive came out as zero, e.g. a
    /// noiseless link or a deterministic SINR.
    #[error("degenerate statistics: {0}")]
    Degenerate(String),

    /// Training pattern construction failed.
    #[error("training pattern: {0}")]
    Pattern(String),

    #[error("unknown sweep axis `{0}`")]
    UnknownAxis(String),

    #[error("failed to parse configuration: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(func: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            func,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
