//! Every stationary point of the overlap on the two Bloch spheres, found by
//! scanning the Lagrange multipliers, for a random state and a W-type state.
//!
//!     cargo run --release --example stationary_points

use gme::solver::{lagrange_stationary_points, DEFAULT_GRID_RESOLUTION};
use gme::{ThreeQubitPureState, WStateParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(name: &str, state: &ThreeQubitPureState) {
    let scan = lagrange_stationary_points(state, DEFAULT_GRID_RESOLUTION);
    println!("{name}: {} stationary points", scan.points.len());
    for p in &scan.points {
        println!(
            "  value {:.10}  λ = ({:+.6}, {:+.6})  residual {:.1e}  {:?}",
            p.value, p.lambda1, p.lambda2, p.residual, p.resolvent
        );
    }
    for c in &scan.singular {
        println!(
            "  singular multipliers ({:+.6}, {:+.6}) cond {:.1e} recovered {}",
            c.lambda1, c.lambda2, c.condition, c.recovered
        );
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    report("random state", &ThreeQubitPureState::random(&mut rng));
    report(
        "W-type (0.6, 0.5, 0.5, 0.37)",
        &WStateParams::renormalized(0.6, 0.5, 0.5, 0.37)?.embed(),
    );
    Ok(())
}
