use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("element is not invertible")]
    NotInvertible,
    #[error("polynomial division leaves a remainder")]
    NotDivisible,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("trace form is degenerate on the basis")]
    DegeneratePairing,
    #[error("matrix is not in the span of the Lie algebra basis")]
    NotInAlgebra,
    #[error("denominator does not split over Q(i): {0}")]
    UnsupportedDenominator(String),
    #[error("representation has no group action (explicit infinitesimal data only)")]
    UnsupportedGroupAction,
    #[error("section has a pole of order {order} at marked point {point}")]
    IrregularSection { point: usize, order: i64 },
    #[error("regularity violation: {0}")]
    RegularityViolation(String),
    #[error("equivariance broken: {0}")]
    EquivarianceBroken(String),
    #[error("no solution within bounds: {0}")]
    Infeasible(String),
    #[error("cannot sample from an empty space")]
    EmptySpace,
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("validation error at {location}: {message}")]
    Validation { location: String, message: String },
    #[error("{0}")]
    Io(String),
}

impl Error {
    pub fn validation(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation { location: location.into(), message: message.into() }
    }

    /// Prefix the location of parse and validation errors with a scenario path.
    pub fn at(self, path: &str) -> Self {
        match self {
            Error::Parse { location, message } => Error::Parse { location: format!("{path}, {location}"), message },
            Error::Validation { location, message } => {
                Error::Validation { location: format!("{path}: {location}"), message }
            }
            other => other,
        }
    }
}
