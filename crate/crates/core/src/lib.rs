//! Geometric measure of entanglement for three-qubit pure states.
//!
//! The closed forms cover W-type states `a|100⟩ + b|010⟩ + c|001⟩ + d|111⟩`
//! ([`measure`]), built on a small cyclic-quadrilateral kernel
//! ([`geometry`]). Two numerical routes in [`solver`] handle arbitrary pure
//! states and serve as independent checks of the closed forms.
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod measure;
pub mod solver;
pub mod state;

pub use error::{GeometryError, MeasureError, SolverError, StateError};
pub use measure::{classify, lambda_max_sq, MeasureResult, Regime};
pub use state::{BlochVector, ThreeQubitPureState, WStateParams};
