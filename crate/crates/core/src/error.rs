use thiserror::Error;

/// Errors raised by the numerical kernels.
///
/// Domain errors are precondition violations by the caller; the remaining
/// variants are numerical failures with the achieved accuracy attached.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix invariant violated at ({row}, {col}): {what}")]
    Invariant { row: usize, col: usize, what: &'static str },

    #[error("quadrature did not converge: estimated error {achieved:e} > requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("ODE integration failed: {0}")]
    Ode(String),

    #[error("Fock truncation inadequate: top-layer occupancy {occupancy:e} (limit {limit:e}); increase n_max")]
    Truncation { occupancy: f64, limit: f64 },

    #[error("Fock basis of size {size} exceeds the budget of {budget} states")]
    BasisTooLarge { size: usize, budget: usize },

    #[error("unitarity violated: |alpha|^2 - |beta|^2 - 1 = {defect:e}")]
    Unitarity { defect: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
