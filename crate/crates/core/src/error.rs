use thiserror::Error;

/// Errors raised when constructing states or coefficient tuples.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },
    #[error("coefficient {index} is negative ({value})")]
    Negative { index: usize, value: f64 },
    #[error("squared norm {norm_sq} differs from 1 by more than {tolerance:e}")]
    NotNormalized { norm_sq: f64, tolerance: f64 },
    #[error("state has zero norm")]
    ZeroNorm,
}

/// Which precondition of a circumcircle construction failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CircumcircleFailure {
    /// `S_q^2 <= 0`: no cyclic convex quadrilateral with these sides.
    ConvexArea,
    /// `S_x^2 <= 0`: the crossed figure has no circumcircle.
    CrossedArea,
    /// `(ac-bd)(bc-ad)(ab-cd) < 0`: the crossed diagonal would be imaginary.
    CrossedNumerator,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid side {index}: {value}")]
    InvalidSide { index: usize, value: f64 },
    #[error("no circumcircle: {0:?}")]
    NoCircumcircle(CircumcircleFailure),
    #[error("degenerate crossed diagonal: ab = cd")]
    DegenerateDiagonal,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("closest product state direction is degenerate (x-component {x_component:e})")]
    DegenerateDirection { x_component: f64 },
    #[error("invalid family specification: {0}")]
    Family(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("no restart converged within {max_iterations} iterations")]
    NonConvergence { max_iterations: usize },
    #[error("Bloch objective {bloch} and direct overlap {direct} disagree")]
    CrossCheckMismatch { bloch: f64, direct: f64 },
}
