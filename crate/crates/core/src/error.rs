use thiserror::Error;

/// Errors raised by the quadrature, spectral and bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HfpError {
    #[error("invalid periodic domain: {0}")]
    InvalidDomain(String),

    #[error("abscissa {x} is {distance:e} from a pole image (minimum {min_distance:e})")]
    SingularityTooClose {
        x: f64,
        distance: f64,
        min_distance: f64,
    },

    #[error("missing derivatives: {0}")]
    MissingDerivatives(&'static str),

    #[error("complex evaluation of the smooth factor is unavailable")]
    MissingComplexEval,

    #[error("spectral resolution too low: tail {tail:e} exceeds limit {limit:e}")]
    SpectralResolutionTooLow { tail: f64, limit: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, HfpError>;
