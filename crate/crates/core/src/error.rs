use thiserror::Error;

use crate::fourier::Convention;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sampling: need at least 3 samples, got {0}")]
    InvalidSampling(usize),

    #[error("invalid material parameters: {0}")]
    InvalidParameters(String),

    /// `C_g = 0` makes both dilatation constants vanish.
    #[error("degenerate applied field: C_g must be nonzero")]
    DegenerateField,

    /// `λ₁ = λ₂` gives `C₁ = C₂`; the flux carries no information about `|D|`.
    #[error("indistinguishable phases: lambda1 == lambda2 gives C1 == C2")]
    IndistinguishablePhases,

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("evaluation radius {r} lies inside the boundary circle of radius {radius}")]
    Domain { r: f64, radius: f64 },

    #[error("point at r = {0} lies on the inclusion interface")]
    InterfacePoint(f64),

    #[error("quadrature order {got} too small, need at least {required}")]
    Quadrature { got: usize, required: usize },

    #[error("expected a {expected} field, got {got}")]
    Convention { expected: Convention, got: Convention },

    #[error("inconsistent boundary data: {0}")]
    Consistency(String),

    #[error("harmonic mode {mode} does not fit in truncation order {order}")]
    TruncationTooSmall { mode: u32, order: usize },

    #[error("linear solver failed on {dofs} unknowns: {reason}")]
    SolverFailure { dofs: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
