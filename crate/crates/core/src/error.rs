use thiserror::Error;

/// Errors raised by the geometric-mechanics routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("point violates the space constraints (residual {residual:.3e})")]
    ConstraintViolation { residual: f64 },

    #[error("vector is not tangent to the space (residual {residual:.3e})")]
    NotTangent { residual: f64 },

    #[error("integration failed at t = {time}: constraint drift {drift:.3e}")]
    IntegrationFailure { time: f64, drift: f64 },

    #[error("one-form is not invariant under the action (residual {residual:.3e})")]
    InvarianceViolation { residual: f64 },

    #[error("Hamiltonian is not invariant under the action (residual {residual:.3e})")]
    SymmetryViolation { residual: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("curve leaves the level set (|mu - alpha| = {residual:.3e} at step {step})")]
    LevelSet { step: usize, residual: f64 },

    #[error("beta is not a lift of a reduced motion (solve residual {residual:.3e} at step {step})")]
    NotALift { step: usize, residual: f64 },

    #[error("invalid Cartan subalgebra: {0}")]
    InvalidCartan(String),

    #[error("root clustering is ambiguous: {0}")]
    Tolerance(String),

    #[error("decomposition error: {0}")]
    Decomposition(String),

    #[error("point lies outside the fundamental Weyl chamber (margin {margin:.3e})")]
    OutsideChamber { margin: f64 },

    #[error("moment values outside the chamber at points {0:?}")]
    Classification(Vec<usize>),

    #[error("basis does not span a subalgebra (residual {residual:.3e})")]
    NotSubalgebra { residual: f64 },

    #[error("invalid submanifold point: {0}")]
    InvalidSubmanifold(String),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("chart construction failed: {0}")]
    Chart(String),

    #[error("cross-section setup error: {0}")]
    Setup(String),

    #[error("simple-root selection failed after {0} attempts")]
    DegenerateFunctional(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
