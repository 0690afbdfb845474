use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("feedback polynomial {poly:#b} is not primitive: period {period}, expected {expected}")]
    NotPrimitive { poly: u32, period: usize, expected: usize },

    #[error("node {0} has no amplitude or signature")]
    MissingNode(u32),

    #[error("set function is not a probability mass function: total {0}")]
    NotNormalized(f64),

    #[error("universe of {0} elements exceeds the supported maximum of {max}", max = crate::rfs::MAX_UNIVERSE)]
    UniverseTooLarge(usize),

    #[error(
        "MAP enumeration needs {terms} likelihood terms, above the cap of {cap}; \
         reduce the number of candidate nodes or the amplitude grid"
    )]
    EnumerationTooLarge { terms: f64, cap: f64 },

    #[error("the random-set detector needs a real-valued received vector")]
    ComplexUnsupported,

    #[error("malformed role pattern: {0}")]
    Pattern(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
