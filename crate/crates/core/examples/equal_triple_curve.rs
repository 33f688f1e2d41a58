//! Λ²_max along the family a = b = c with d from 0 to 1, with the regime
//! of each point and where the curve changes branch.
//!
//!     cargo run --example equal_triple_curve

use gme::measure::{locate_boundary, sweep, Family};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = Family::parse("a=b=c", "d", (0.0, 1.0))?;
    let points = sweep(&family, 21)?;
    println!("{:>6} {:>10} {:>10}  regime", "d", "Λ²", "1 - Λ²");
    for p in &points {
        let mark = if p.transition { "*" } else { " " };
        println!(
            "{:>6.3} {:>10.6} {:>10.6} {mark}{}",
            p.param,
            p.lambda_max_sq,
            1.0 - p.lambda_max_sq,
            p.regime
        );
    }

    // refine each branch change to machine precision; a grid point sitting
    // exactly on a surface brackets it twice
    let mut last = f64::NAN;
    for w in points.windows(2) {
        if let Some(b) = locate_boundary(&family, w[0].param, w[1].param)? {
            if (b.location - last).abs() < 1e-12 {
                continue;
            }
            last = b.location;
            println!(
                "{:?} boundary at d = {:.12}, branches {:.12} | {:.12}",
                b.kind, b.location, b.left, b.right
            );
        }
    }
    Ok(())
}
