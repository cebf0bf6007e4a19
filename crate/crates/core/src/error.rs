use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("invalid {field}: {reason}")]
    Domain { field: &'static str, reason: String },

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerances.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (achieved error {achieved:e}, requested {requested:e})"
    )]
    Convergence {
        achieved: f64,
        requested: f64,
        subdivisions: usize,
    },

    /// A probability-like value left [0, 1] by more than rounding can explain.
    #[error("value {value} lies outside [0, 1] by {excess:e}, more than the allowed clamp")]
    ClampExceeded { value: f64, excess: f64 },
}

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            field,
            reason: reason.into(),
        }
    }
}
