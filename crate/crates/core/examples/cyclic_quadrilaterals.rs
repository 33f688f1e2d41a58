//! The geometry kernel on its own: circumradii of the convex and crossed
//! quadrilaterals with given sides, and the identity linking their
//! difference to the product of the sides.
//!
//!     cargo run --example cyclic_quadrilaterals

use gme::geometry::{self, QuadSides};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for [a, b, c, d] in [
        [1.0, 1.0, 1.0, 1.0],
        [3.0, 4.0, 5.0, 6.0],
        [0.5, 0.6, 0.55, 0.2],
    ] {
        let sides = QuadSides::new(a, b, c, d)?;
        println!("sides {a} {b} {c} {d}");
        let convex = geometry::convex_circumradius_sq(&sides)?;
        println!(
            "  convex  S² = {:.6}  R² = {:.6}",
            convex.area_sq, convex.radius_sq
        );
        match geometry::crossed_circumradius_sq(&sides) {
            Ok(crossed) => {
                println!(
                    "  crossed S² = {:.6}  R² = {:.6}",
                    crossed.area_sq, crossed.radius_sq
                );
                let direct = geometry::circumradius_difference(&sides)?;
                let identity = geometry::circumradius_difference_identity(&sides)?;
                println!("  4R_q² - 4R_x²: direct {direct:.12e}, from abcd {identity:.12e}");
            }
            Err(e) => println!("  crossed: {e}"),
        }
        println!("  r = {:.6}", geometry::sides_r(&sides));
    }
    Ok(())
}
