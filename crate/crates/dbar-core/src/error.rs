//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by form algebra, quadrature and the solver.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or form shapes are incompatible for the requested operation.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Operands live on different coefficient backends (different series
    /// ambient dimension, or different grids / radii).
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),

    /// A form had the wrong degree for the requested operation.
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    /// Inversion of a non-unit: singular constant term (series backend) or a
    /// singular sample matrix (grid backend).
    #[error("non-invertible element: {0}")]
    NonUnit(String),

    /// Evaluation point outside the coefficient domain.
    #[error("point outside domain: {0}")]
    OutOfDomain(String),

    /// Requested configuration is not supported (e.g. numeric solve with n > 1).
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// Malformed input data.
    #[error("invalid input: {0}")]
    BadInput(String),

    /// The step parameter violated the unit-safety gate sup < eps; the initial
    /// radius is too large for the contraction to start.
    #[error(
        "step {step}: gauge step parameter has sup norm {sup:.6e} >= eps = {eps:.3}; \
         try a smaller initial radius r0"
    )]
    StepFailure { step: usize, sup: f64, eps: f64 },

    /// The monitored norm grew for two consecutive steps.
    #[error(
        "diverging at step {step}: a_k grew twice in a row ({prev:.6e} -> {last:.6e}); \
         try halving the initial radius r0"
    )]
    Diverged { step: usize, prev: f64, last: f64 },

    /// The input connection data fails the integrability gate.
    #[error("input not integrable: residual {residual:.6e} exceeds gate {gate:.6e}")]
    NotIntegrable { residual: f64, gate: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
