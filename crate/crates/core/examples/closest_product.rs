//! Closed-form Λ²_max and the closest product state for a few W-type states,
//! checked against the overlap of the returned product.
//!
//!     cargo run --example closest_product

use gme::{lambda_max_sq, WStateParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = 1.0 / 3f64.sqrt();
    let a7 = 1.0 / 7f64.sqrt();
    let states = [
        ("W", WStateParams::new(a, a, a, 0.0)?),
        (
            "(0.55076, 0.55076, 0.55076, 0.3)",
            WStateParams::renormalized(0.55076, 0.55076, 0.55076, 0.3)?,
        ),
        ("shared point", WStateParams::new(a7, a7, a7, 2.0 * a7)?),
        ("dominant |100⟩", WStateParams::new(0.8, 0.4, 0.4, 0.2)?),
        ("GHZ-like", WStateParams::renormalized(0.0, 0.0, 1.0, 1.0)?),
    ];
    for (name, p) in states {
        let res = lambda_max_sq(&p);
        let cp = &res.closest_product;
        println!("{name}: {:?}", p.coeffs());
        println!(
            "  Λ² = {:.12}  E = {:.12}  {}",
            res.lambda_max_sq, res.geometric_measure, res.regime
        );
        println!("  u = {:?}", cp.u.as_vector().as_slice());
        println!("  v = {:?}", cp.v.as_vector().as_slice());
        println!("  w = {:?}", cp.w.as_vector().as_slice());
        println!("  overlap of product = {:.12}", cp.overlap);
        if let Some((l1, l2)) = res.lagrange {
            println!("  multipliers λ1 = {l1:.9}, λ2 = {l2:.9}");
        }
    }
    Ok(())
}
