//! Numerical maximization of the product-state overlap for arbitrary
//! three-qubit pure states.
//!
//! Both routes work on the reduced AB data: for a pure state the overlap
//! maximized over qubit C equals `¼(1 + u·r_A + v·r_B + uᵀ g v)`, whose
//! stationary points satisfy
//!
//! ```text
//! r_A + g v = λ1 u,    r_B + gᵀ u = λ2 v,    |u| = |v| = 1.
//! ```
//!
//! [`alternating_ascent`] climbs this objective from many random starts;
//! [`lagrange_stationary_points`] enumerates its stationary points through
//! the multipliers `(λ1, λ2)`.

mod ascent;
mod lagrange;

pub use ascent::{
    alternating_ascent, ascent_trace, full_state_ascent, AscentResult, FullStateResult,
    OracleConfig, RestartOutcome, RestartStatus,
};
pub use lagrange::{
    lagrange_stationary_points, Resolvent, SingularCandidate, StationaryPoint, StationaryScan,
    DEFAULT_GRID_RESOLUTION,
};

use nalgebra::Vector3;

use crate::state::{CorrelationData, ThreeQubitPureState};

/// `max(|r_A + g v - λ1 u|, |r_B + gᵀ u - λ2 v|)`.
pub fn stationarity_residual(
    state: &ThreeQubitPureState,
    u: &Vector3<f64>,
    v: &Vector3<f64>,
    lambda1: f64,
    lambda2: f64,
) -> f64 {
    residual_with(&state.correlation_data(), u, v, lambda1, lambda2)
}

pub(crate) fn residual_with(
    cd: &CorrelationData,
    u: &Vector3<f64>,
    v: &Vector3<f64>,
    lambda1: f64,
    lambda2: f64,
) -> f64 {
    let first = cd.r_a + cd.g * v - lambda1 * u;
    let second = cd.r_b + cd.g.transpose() * u - lambda2 * v;
    first.norm().max(second.norm())
}

/// Multipliers that best satisfy the stationarity equations for unit `u`,
/// `v`: `λ1 = u·(r_A + g v)`, `λ2 = v·(r_B + gᵀ u)`.
pub fn multipliers(cd: &CorrelationData, u: &Vector3<f64>, v: &Vector3<f64>) -> (f64, f64) {
    (
        u.dot(&(cd.r_a + cd.g * v)),
        v.dot(&(cd.r_b + cd.g.transpose() * u)),
    )
}
