use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Caller violated a structural precondition (length mismatch, index range, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A numerical routine did not meet its tolerance within its budget.
    /// `estimate` is the best value reached and `error` its error estimate.
    #[error("{what} did not converge: estimate {estimate:e}, error estimate {error:e}")]
    Convergence {
        what: &'static str,
        estimate: f64,
        error: f64,
    },

    /// A probability assembled from several terms fell outside `[-tol, 1 + tol]`.
    #[error("internal consistency: probability {value:e} outside [0, 1] beyond tolerance {tol:e}")]
    Consistency { value: f64, tol: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
