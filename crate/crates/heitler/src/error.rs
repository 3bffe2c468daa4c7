//! Error types shared across the crate.

use thiserror::Error;

/// Unified error type for model construction, linear algebra, steady-state
/// solving, and domain-restricted closed forms.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameter set violates a structural constraint (positivity, unit
    /// beam-splitter normalization, truncation bounds, ...).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Array shapes do not line up for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The Liouvillian has no eigenvalue within tolerance of zero, so no
    /// steady state could be identified.
    #[error("no steady state: smallest |eigenvalue| {smallest:e} exceeds tolerance {tol:e}")]
    NoSteadyState { smallest: f64, tol: f64 },

    /// More than one eigenvalue sits within tolerance of zero; the stationary
    /// manifold is degenerate and a unique steady state cannot be returned.
    #[error("degenerate steady state: {count} eigenvalues within tolerance {tol:e} of zero")]
    DegenerateSteadyState { count: usize, tol: f64 },

    /// A candidate density matrix has a significantly negative eigenvalue.
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:e} below -{tol:e}")]
    NotPositive { min_eig: f64, tol: f64 },

    /// A closed-form expression was evaluated outside its domain of validity.
    #[error("domain error in {what}: {reason}")]
    Domain { what: String, reason: String },

    /// Time propagation produced non-finite values.
    #[error("propagation failure at tau = {tau:e}: non-finite correlator")]
    PropagationFailure { tau: f64 },

    /// Miscellaneous numerical failure (vanishing trace, non-finite value, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Backend linear-algebra failure (LAPACK, factorization, ...).
    #[error("linear algebra backend error: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand constructor for domain errors.
    pub fn domain(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Domain {
            what: what.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code category used by the command-line frontend:
    /// 2 = invalid configuration, 3 = numerical failure, 4 = domain error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_) | Error::DimensionMismatch(_) => 2,
            Error::NoSteadyState { .. }
            | Error::DegenerateSteadyState { .. }
            | Error::NotPositive { .. }
            | Error::PropagationFailure { .. }
            | Error::Numerical(_)
            | Error::Linalg(_) => 3,
            Error::Domain { .. } => 4,
        }
    }
}
